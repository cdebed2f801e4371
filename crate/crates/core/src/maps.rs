//! The parameter-space maps `E^(+)`, `E^(−)` and their interpolation `E^(λ)`
//! from block operators on `ℂⁿ⊗H` to `n×n` matrices.

use crate::error::{Error, Result};
use crate::linalg::{c, trace_product, BlockOperator, ComplexMatrix, DensityMatrix};

/// Tolerance for the Hermitian and `T1`-symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A block operator with `𝕏 = 𝕏†` and `𝕏^{T1} = 𝕏`.
#[derive(Debug, Clone)]
pub struct SymmetricHermitianBlockOperator(BlockOperator);

impl SymmetricHermitianBlockOperator {
    pub fn new(x: BlockOperator) -> Result<Self> {
        if !x.is_symmetric_hermitian(SYMMETRY_TOL) {
            return Err(Error::InvalidInput("block operator is not Hermitian and T1-symmetric".into()));
        }
        Ok(SymmetricHermitianBlockOperator(x))
    }

    pub fn inner(&self) -> &BlockOperator {
        &self.0
    }
}

/// `E^(+)(𝕏)_jk = tr[√S 𝕏_jk √S] = tr[S 𝕏_jk]`.
pub fn map_plus(x: &BlockOperator, s: &DensityMatrix) -> Result<ComplexMatrix> {
    if x.d() != s.dim() {
        return Err(Error::InvalidInput(format!("block dimension {} but state dimension {}", x.d(), s.dim())));
    }
    let n = x.n();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| trace_product(s.matrix(), x.block(j, k))))
}

/// `E^(−) = E^(+) ∘ T1`.
pub fn map_minus(x: &BlockOperator, s: &DensityMatrix) -> Result<ComplexMatrix> {
    map_plus(&x.partial_transpose_t1(), s)
}

/// `((1+λ)/2) E^(+) + ((1−λ)/2) E^(−)`.
pub fn map_lambda(x: &BlockOperator, s: &DensityMatrix, lambda: f64) -> Result<ComplexMatrix> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("λ = {lambda} outside [-1, 1]")));
    }
    let plus = map_plus(x, s)?;
    let minus = map_minus(x, s)?;
    Ok(plus * c((1.0 + lambda) / 2.0, 0.) + minus * c((1.0 - lambda) / 2.0, 0.))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian_matrix, identity, max_abs, outer_xxt1_matrices, HermitianMatrix};
    use crate::sdp::z_lambda;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_complex(rng: &mut ChaCha8Rng, r: usize, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, k, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn rand_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
        let g = rand_complex(rng, d, d);
        let p = &g * g.adjoint();
        let t = crate::linalg::trace(&p);
        DensityMatrix::new(p / t).unwrap()
    }

    fn rand_herm(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
        HermitianMatrix::hermitianize(rand_complex(rng, d, d)).into_matrix()
    }

    #[test]
    fn kron_examples() {
        let s = DensityMatrix::from_bloch([0.2, -0.1, 0.4]).unwrap();
        let a = ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0.3, 0.), c(0.3, 0.), c(2., 0.)]);
        let out = map_plus(&BlockOperator::kron(&a, &identity(2)), &s).unwrap();
        assert!(max_abs(&(out - &a)) < 1e-14);
        let b = pauli_like();
        let out = map_plus(&BlockOperator::kron(&identity(3), &b), &s).unwrap();
        let expect = identity(3) * trace_product(s.matrix(), &b);
        assert!(max_abs(&(out - expect)) < 1e-14);
    }

    fn pauli_like() -> ComplexMatrix {
        crate::linalg::pauli::x() * c(0.5, 0.) + crate::linalg::pauli::z()
    }

    #[test]
    fn endpoints_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = rand_state(&mut rng, 2);
        let x = BlockOperator::from_fn(2, 2, |_, _| rand_complex(&mut rng, 2, 2));
        assert_eq!(map_lambda(&x, &s, 1.0).unwrap(), map_plus(&x, &s).unwrap());
        assert!(max_abs(&(map_lambda(&x, &s, -1.0).unwrap() - map_minus(&x, &s).unwrap())) < 1e-15);
        assert!(map_lambda(&x, &s, 1.5).is_err());
        assert!(map_plus(&x, &DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap()).is_err());
    }

    #[test]
    fn symmetric_hermitian_wrapper() {
        let x = BlockOperator::kron(&identity(2), &pauli_like());
        assert!(SymmetricHermitianBlockOperator::new(x).is_ok());
        let y = BlockOperator::kron(&crate::linalg::pauli::y(), &identity(2));
        assert!(SymmetricHermitianBlockOperator::new(y).is_err());
    }

    #[test]
    fn gram_of_outer_product_matches_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = rand_state(&mut rng, 3);
        let xs: Vec<ComplexMatrix> = (0..2).map(|_| rand_herm(&mut rng, 3)).collect();
        let outer = outer_xxt1_matrices(&xs).unwrap();
        for l in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            let m = map_lambda(&outer, &s, l).unwrap();
            // E^(λ)(XX^T1) is the reflected member Z^(−λ) = (Z^(λ))ᵀ.
            assert!(max_abs(&(&m - z_lambda(s.matrix(), &xs, -l))) < 1e-12);
            assert!(max_abs(&(&m - z_lambda(s.matrix(), &xs, l).transpose())) < 1e-12);
            let min = eig_hermitian_matrix(&m).unwrap().min_value();
            assert!(min >= -1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn real_symmetric_on_symmetric_hermitian(seed in any::<u64>(), n in 1usize..4, d in 1usize..4, l in -1.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = rand_state(&mut rng, d);
            let mut x = BlockOperator::zeros(n, d);
            for j in 0..n {
                for k in j..n {
                    let h = rand_herm(&mut rng, d);
                    *x.block_mut(j, k) = h.clone();
                    *x.block_mut(k, j) = h;
                }
            }
            let m = map_lambda(&x, &s, l).unwrap();
            prop_assert!(m.iter().all(|z| z.im.abs() < 1e-10));
            prop_assert!(max_abs(&(&m - m.transpose())) < 1e-10);
        }

        #[test]
        fn positive_on_psd(seed in any::<u64>(), n in 1usize..4, d in 1usize..4, l in -1.0f64..=1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = rand_state(&mut rng, d);
            let g = rand_complex(&mut rng, n * d, n * d);
            let x = BlockOperator::from_dense(&(&g * g.adjoint()), n).unwrap();
            let m = map_lambda(&x, &s, l).unwrap();
            prop_assert!(eig_hermitian_matrix(&m).unwrap().min_value() >= -1e-9);
        }
    }
}
