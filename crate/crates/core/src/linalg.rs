//! Dense complex linear algebra on the system Hilbert space and on the
//! extended space `C^n ⊗ H`.
//!
//! Everything here is a pure function of its inputs. Matrices are
//! `nalgebra::DMatrix<Complex<f64>>`; the newtypes [`HermitianMatrix`] and
//! [`DensityMatrix`] carry validated invariants.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type RealMatrix = DMatrix<f64>;

/// Eigenvalues at or above `-PSD_CLIP` are treated as zero in PSD operations.
pub const PSD_CLIP: f64 = 1e-10;

/// Relative Hermiticity tolerance applied at construction.
pub const HERMITIAN_RTOL: f64 = 1e-12;

/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entry modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_real(a: &RealMatrix) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn is_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

/// Promote a real matrix to a complex one.
pub fn complexify(a: &RealMatrix) -> ComplexMatrix {
    a.map(|x| c(x, 0.0))
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// `tr[A B]` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Max-norm of the commutator `[A, B]`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Pauli matrices.
pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates squareness, finiteness and Hermiticity within
    /// `HERMITIAN_RTOL · ‖A‖_max`. The stored matrix is symmetrized exactly.
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidInput(format!(
                "Hermitian matrix must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if !is_finite(&a) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let scale = max_abs(&a);
        let skew = max_abs(&(&a - a.adjoint()));
        if skew > HERMITIAN_RTOL * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (‖A − A†‖_max = {skew:e})"
            )));
        }
        Ok(Self::hermitianize(a))
    }

    /// `(A + A†)/2`, for results of arithmetic that are Hermitian up to rounding.
    pub fn hermitianize(a: ComplexMatrix) -> Self {
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        HermitianMatrix(h)
    }

    pub fn from_real(a: &RealMatrix) -> Result<Self> {
        Self::new(complexify(a))
    }

    pub fn zeros(d: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        HermitianMatrix(identity(d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(&self.0 * c(s, 0.0))
    }

    pub fn trace(&self) -> f64 {
        trace(&self.0).re
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// A positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(a)?;
        Self::from_hermitian(h)
    }

    pub fn from_hermitian(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidInput(format!("density matrix trace {tr} != 1")));
        }
        let eig = eig_hermitian(&h)?;
        let min = eig.min_value();
        if min < -PSD_CLIP {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(DensityMatrix(h))
    }

    /// Qubit state from a Bloch vector `(x, y, z)`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let m = (identity(2) + pauli::x() * c(r[0], 0.) + pauli::y() * c(r[1], 0.)
            + pauli::z() * c(r[2], 0.))
            * c(0.5, 0.);
        Self::new(m)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let d = p.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for (i, &pi) in p.iter().enumerate() {
            m[(i, i)] = c(pi, 0.);
        }
        Self::new(m)
    }

    /// Mixes with white noise: `(1 − ε) ρ + ε I/d`.
    pub fn depolarize(&self, eps: f64) -> Self {
        let d = self.dim();
        let m = self.matrix() * c(1.0 - eps, 0.) + identity(d) * c(eps / d as f64, 0.);
        DensityMatrix(HermitianMatrix::hermitianize(m))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }
}

/// Hermitian eigendecomposition `A = U diag(values) U†`, values descending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `U f(diag) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let s = f(self.values[k]);
            scaled.column_mut(k).scale_mut(s);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(a: &HermitianMatrix) -> Result<Eigen> {
    eig_hermitian_matrix(a.matrix())
}

/// Eigendecomposition of a matrix assumed Hermitian; only finiteness is checked.
pub fn eig_hermitian_matrix(a: &ComplexMatrix) -> Result<Eigen> {
    if !a.is_square() {
        return Err(Error::InvalidInput("eigendecomposition of non-square matrix".into()));
    }
    if !is_finite(a) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let sym = (a + a.adjoint()) * c(0.5, 0.);
    let se = nalgebra::SymmetricEigen::new(sym);
    let d = a.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
    let values = DVector::from_iterator(d, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(Eigen { values, vectors })
}

/// Eigendecomposition of a real symmetric matrix, values descending.
pub fn eig_symmetric(a: &RealMatrix) -> (DVector<f64>, RealMatrix) {
    let sym = (a + a.transpose()) * 0.5;
    let se = nalgebra::SymmetricEigen::new(sym);
    let d = a.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
    let values = DVector::from_iterator(d, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = RealMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-PSD_CLIP, 0)` are
/// clipped to zero.
pub fn sqrt_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(a)?;
    let min = eig.min_value();
    if min < -PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(HermitianMatrix::hermitianize(eig.reconstruct_with(|s| s.max(0.0).sqrt())))
}

/// Real symmetric PSD square root.
pub fn sqrt_psd_real(a: &RealMatrix) -> Result<RealMatrix> {
    let (vals, vecs) = eig_symmetric(a);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_CLIP {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let mut scaled = vecs.clone();
    for k in 0..vals.len() {
        scaled.column_mut(k).scale_mut(vals[k].max(0.0).sqrt());
    }
    let r = &scaled * vecs.transpose();
    Ok((&r + r.transpose()) * 0.5)
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "trace norm of non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if !is_finite(a) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(a.clone().singular_values().iter().sum())
}

pub fn trace_norm_real(a: &RealMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::InvalidInput("trace norm of non-square matrix".into()));
    }
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(a.clone().singular_values().iter().sum())
}

/// `A = P + iQ  ↦  [[P, −Q], [Q, P]]`.
pub fn real_embedding(a: &ComplexMatrix) -> RealMatrix {
    let (r, cdim) = a.shape();
    let mut out = RealMatrix::zeros(2 * r, 2 * cdim);
    for i in 0..r {
        for j in 0..cdim {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(r + i, cdim + j)] = z.re;
            out[(i, cdim + j)] = -z.im;
            out[(r + i, j)] = z.im;
        }
    }
    out
}

/// Operator on `C^n ⊗ H` stored as an `n × n` array of `d × d` blocks,
/// row-major by block index `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    n: usize,
    d: usize,
    blocks: Vec<ComplexMatrix>,
}

impl BlockOperator {
    pub fn zeros(n: usize, d: usize) -> Self {
        BlockOperator { n, d, blocks: vec![ComplexMatrix::zeros(d, d); n * n] }
    }

    /// Builds from row-major blocks; all must be `d × d`.
    pub fn from_blocks(n: usize, d: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} blocks, got {}",
                n * n,
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| b.shape() != (d, d)) {
            return Err(Error::InvalidInput(format!("all blocks must be {d}x{d}")));
        }
        Ok(BlockOperator { n, d, blocks })
    }

    pub fn from_fn(n: usize, d: usize, mut f: impl FnMut(usize, usize) -> ComplexMatrix) -> Self {
        let mut blocks = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let b = f(j, k);
                assert_eq!(b.shape(), (d, d), "block ({j},{k}) has wrong shape");
                blocks.push(b);
            }
        }
        BlockOperator { n, d, blocks }
    }

    /// `A ⊗ B` for an `n × n` matrix `A` and `d × d` matrix `B`.
    pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        let n = a.nrows();
        Self::from_fn(n, b.nrows(), |j, k| b * a[(j, k)])
    }

    pub fn from_dense(m: &ComplexMatrix, n: usize) -> Result<Self> {
        if !m.is_square() || n == 0 || m.nrows() % n != 0 {
            return Err(Error::InvalidInput("dense matrix is not an n x n block matrix".into()));
        }
        let d = m.nrows() / n;
        Ok(Self::from_fn(n, d, |j, k| m.view((j * d, k * d), (d, d)).into_owned()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block(&self, j: usize, k: usize) -> &ComplexMatrix {
        &self.blocks[j * self.n + k]
    }

    pub fn block_mut(&mut self, j: usize, k: usize) -> &mut ComplexMatrix {
        &mut self.blocks[j * self.n + k]
    }

    /// The canonical `(nd) × (nd)` matrix.
    pub fn to_dense(&self) -> ComplexMatrix {
        let (n, d) = (self.n, self.d);
        let mut m = ComplexMatrix::zeros(n * d, n * d);
        for j in 0..n {
            for k in 0..n {
                m.view_mut((j * d, k * d), (d, d)).copy_from(self.block(j, k));
            }
        }
        m
    }

    /// Block-index transpose over the parameter factor; blocks themselves are untouched.
    pub fn partial_transpose_t1(&self) -> Self {
        Self::from_fn(self.n, self.d, |j, k| self.block(k, j).clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, self.d, |j, k| self.block(k, j).adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(self.n, self.d, |j, k| self.block(j, k) * c(s, 0.))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, self.d, |j, k| self.block(j, k) + other.block(j, k))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, self.d, |j, k| self.block(j, k) - other.block(j, k))
    }

    /// Trace over both factors: `Σ_j tr[A_jj]`.
    pub fn full_trace(&self) -> C64 {
        (0..self.n).map(|j| trace(self.block(j, j))).sum()
    }

    /// `𝕋r[A B]`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.n {
            for k in 0..self.n {
                acc += trace_product(self.block(j, k), other.block(k, j));
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Hermitian and invariant under the partial transpose, both within `tol`.
    pub fn is_symmetric_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).max_abs() <= tol
            && self.sub(&self.partial_transpose_t1()).max_abs() <= tol
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_hermitian_matrix(&self.to_dense())?.min_value())
    }
}

/// A vector `(X_1, …, X_n)` of Hermitian operators of common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorVector(Vec<HermitianMatrix>);

impl OperatorVector {
    pub fn new(ops: Vec<HermitianMatrix>) -> Result<Self> {
        if let Some(first) = ops.first() {
            let d = first.dim();
            if ops.iter().any(|x| x.dim() != d) {
                return Err(Error::InvalidInput("operator vector entries differ in dimension".into()));
            }
        }
        Ok(OperatorVector(ops))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.first().map_or(0, |x| x.dim())
    }

    pub fn get(&self, j: usize) -> &HermitianMatrix {
        &self.0[j]
    }

    pub fn iter(&self) -> impl Iterator<Item = &HermitianMatrix> {
        self.0.iter()
    }

    /// Stacked `(nd) × d` column.
    pub fn to_column(&self) -> ComplexMatrix {
        let (n, d) = (self.len(), self.dim());
        let mut m = ComplexMatrix::zeros(n * d, d);
        for (j, x) in self.0.iter().enumerate() {
            m.view_mut((j * d, 0), (d, d)).copy_from(x.matrix());
        }
        m
    }
}

/// `X X^{T1}`: block `(j, k)` is `X_j X_k`.
pub fn outer_xxt1(x: &OperatorVector) -> BlockOperator {
    let (n, d) = (x.len(), x.dim());
    BlockOperator::from_fn(n, d, |j, k| x.get(j).matrix() * x.get(k).matrix())
}

/// Same as [`outer_xxt1`] but for an arbitrary slice of equally sized matrices.
pub fn outer_xxt1_matrices(xs: &[ComplexMatrix]) -> Result<BlockOperator> {
    let d = xs.first().map_or(0, |m| m.nrows());
    if xs.iter().any(|m| m.shape() != (d, d)) {
        return Err(Error::InvalidInput("operator dimension mismatch".into()));
    }
    Ok(BlockOperator::from_fn(xs.len(), d, |j, k| &xs[j] * &xs[k]))
}
