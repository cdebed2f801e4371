//! Closed-form bounds: the direct quantum analogue of the classical optimum,
//! the λ-logarithmic-derivative family, its maximum over λ, and the
//! Personick matrix bound.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::bound::BoundValue;
use crate::error::{Error, Result};
use crate::linalg::{
    c, complexify, eig_hermitian, eig_hermitian_matrix, max_abs, sqrt_psd_real, trace, trace_norm_real,
    trace_product, ComplexMatrix, HermitianMatrix, RealMatrix, PSD_CLIP,
};
use crate::model::AveragedQuantities;

/// Denominators of the eigenbasis division below this are rejected.
pub const LD_DENOMINATOR_MIN: f64 = 1e-12;

/// Relative residual the λLD solution must satisfy.
pub const LD_RESIDUAL_RTOL: f64 = 1e-9;

pub const DEFAULT_LAMBDA_GRID: usize = 41;

/// Golden-section refinement stops once the bracket is this narrow.
pub const LAMBDA_REFINE_TOL: f64 = 1e-4;

/// Grid maxima closer than this are considered tied.
pub const LAMBDA_TIE_TOL: f64 = 1e-12;

pub fn direct_bound(avg: &AveragedQuantities) -> Result<BoundValue> {
    let s_bar = avg.s_bar.to_dense();
    let min = eig_hermitian_matrix(&s_bar)?.min_value();
    if min <= PSD_CLIP {
        return Err(Error::SingularAveragedState { min_eigenvalue: min });
    }
    let s_bar = (&s_bar + s_bar.adjoint()) * c(0.5, 0.);
    let chol = Cholesky::new(s_bar.clone())
        .ok_or(Error::SingularAveragedState { min_eigenvalue: min })?;
    let d_bar = avg.d_bar.to_column();
    let x_opt = chol.solve(&d_bar);
    // tr[X† S̄ X] at the optimizer equals tr[D̄† S̄⁻¹ D̄].
    let quad = trace(&(x_opt.adjoint() * &s_bar * &x_opt));
    let cross = trace(&(d_bar.adjoint() * &x_opt));
    let scale = avg.w_bar.abs().max(1.0);
    if (quad - cross).norm() > 1e-9 * scale || quad.im.abs() > 1e-9 * scale {
        return Err(Error::InternalInconsistency(format!(
            "direct bound quadratic form {quad} disagrees with cross term {cross}"
        )));
    }
    Ok(BoundValue::new("direct", avg.w_bar - cross.re, 1e-9 * scale))
}

/// Solution of `D_B,j = ((1+λ)/2) S_B L_j + ((1−λ)/2) L_j S_B` for every `j`,
/// with `K_jk = tr[D_B,k L_j]`.
#[derive(Debug, Clone)]
pub struct LambdaLdSolution {
    pub lambda: f64,
    pub l: Vec<ComplexMatrix>,
    pub k: ComplexMatrix,
}

impl LambdaLdSolution {
    /// Largest relative residual `‖D_j − α S L_j − β L_j S‖_max / ‖D_j‖_max`.
    pub fn relative_residual(&self, avg: &AveragedQuantities) -> f64 {
        let (alpha, beta) = lambda_coefficients(self.lambda);
        let s = avg.s_b.matrix();
        self.l
            .iter()
            .zip(avg.d_b.iter())
            .map(|(l, d)| {
                let r = d.matrix() - (s * l) * c(alpha, 0.) - (l * s) * c(beta, 0.);
                let scale = max_abs(d.matrix());
                if scale == 0.0 {
                    max_abs(&r)
                } else {
                    max_abs(&r) / scale
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn re_k(&self) -> RealMatrix {
        self.k.map(|z| z.re)
    }

    pub fn im_k(&self) -> RealMatrix {
        self.k.map(|z| z.im)
    }
}

pub(crate) fn lambda_coefficients(lambda: f64) -> (f64, f64) {
    ((1.0 + lambda) / 2.0, (1.0 - lambda) / 2.0)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("λ = {lambda} outside [-1, 1]")));
    }
    Ok(())
}

pub fn solve_lambda_ld(avg: &AveragedQuantities, lambda: f64) -> Result<LambdaLdSolution> {
    check_lambda(lambda)?;
    avg.require_full_rank()?;
    let ops: Vec<ComplexMatrix> = avg.d_b.iter().map(|d| d.matrix().clone()).collect();
    let l = solve_ld_equation(avg.s_b.hermitian(), &ops, lambda)?;
    let n = l.len();
    let k = ComplexMatrix::from_fn(n, n, |j, kk| trace_product(avg.d_b.get(kk).matrix(), &l[j]));
    let sol = LambdaLdSolution { lambda, l, k };
    let res = sol.relative_residual(avg);
    if res > LD_RESIDUAL_RTOL {
        return Err(Error::InternalInconsistency(format!(
            "λLD residual {res:e} exceeds {LD_RESIDUAL_RTOL:e}"
        )));
    }
    Ok(sol)
}

/// Solves `D = ((1+λ)/2) S L + ((1−λ)/2) L S` for each right-hand side by
/// element-wise division in the eigenbasis of `S`. No rank check is made on
/// `S`; only the individual denominators are guarded.
pub fn solve_ld_equation(
    s: &HermitianMatrix,
    rhs: &[ComplexMatrix],
    lambda: f64,
) -> Result<Vec<ComplexMatrix>> {
    check_lambda(lambda)?;
    let eig = eig_hermitian(s)?;
    let (alpha, beta) = lambda_coefficients(lambda);
    let u = &eig.vectors;
    let vals = &eig.values;
    let d = vals.len();
    rhs.iter()
        .map(|dj| {
            let mut t = u.adjoint() * dj * u;
            for a in 0..d {
                for b in 0..d {
                    let den = alpha * vals[a] + beta * vals[b];
                    if den < LD_DENOMINATOR_MIN {
                        return Err(Error::IllConditionedLdEquation { a, b, denominator: den });
                    }
                    t[(a, b)] /= den;
                }
            }
            Ok(u * t * u.adjoint())
        })
        .collect()
}

fn require_constant_weight(avg: &AveragedQuantities) -> Result<&RealMatrix> {
    avg.constant_weight.as_ref().ok_or(Error::UnsupportedWeight)
}

/// `−Tr[W Re K] + Tr|√W Im K √W| + w̄` for a given λ solution.
pub fn bld_value(avg: &AveragedQuantities, sol: &LambdaLdSolution) -> Result<f64> {
    let w = require_constant_weight(avg)?;
    let sqrt_w = sqrt_psd_real(w)?;
    let re = (w * sol.re_k()).trace();
    let im = trace_norm_real(&(&sqrt_w * sol.im_k() * &sqrt_w))?;
    Ok(-re + im + avg.w_bar)
}

pub fn bld_bound(avg: &AveragedQuantities, lambda: f64) -> Result<BoundValue> {
    require_constant_weight(avg)?;
    let sol = solve_lambda_ld(avg, lambda)?;
    let value = bld_value(avg, &sol)?;
    Ok(BoundValue::new("bld", value, LD_RESIDUAL_RTOL).with_lambda(lambda))
}

/// Maximizes the λLD bound over `[-1, 1]`: a uniform grid with
/// `grid_points` (odd, so λ = 0 is included) followed by golden-section
/// refinement inside the neighbouring grid cells. Returns the bound and its
/// maximizer; among tied grid maxima the smallest `|λ|` wins, then positive λ.
pub fn bld_max_over_lambda(avg: &AveragedQuantities, grid_points: usize) -> Result<(BoundValue, f64)> {
    if grid_points < 3 || grid_points % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "λ grid needs an odd number (≥ 3) of points, got {grid_points}"
        )));
    }
    require_constant_weight(avg)?;
    let eval = |lambda: f64| -> Result<f64> { bld_value(avg, &solve_lambda_ld(avg, lambda)?) };

    let step = 2.0 / (grid_points - 1) as f64;
    let grid = lambda_grid(grid_points);
    let values = grid.iter().map(|&l| eval(l)).collect::<Result<Vec<_>>>()?;
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lambda_star, mut value_star) = grid
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v >= best - LAMBDA_TIE_TOL)
        .map(|(&l, &v)| (l, v))
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(b.0.total_cmp(&a.0)))
        .expect("grid is non-empty");

    let (lo, hi) = ((lambda_star - step).max(-1.0), (lambda_star + step).min(1.0));
    let (l_ref, v_ref) = golden_section_max(lo, hi, LAMBDA_REFINE_TOL, &eval)?;
    if v_ref > value_star + LAMBDA_TIE_TOL {
        lambda_star = l_ref;
        value_star = v_ref;
    }
    let bound = BoundValue::new("bld_max", value_star, LD_RESIDUAL_RTOL)
        .with_lambda(lambda_star)
        .with_note(format!("grid_points={grid_points}; refined to |Δλ| <= {LAMBDA_REFINE_TOL:e}"));
    Ok((bound, lambda_star))
}

/// Uniform grid on `[-1, 1]`, exactly symmetric about zero.
pub fn lambda_grid(points: usize) -> Vec<f64> {
    let half = (points - 1) as f64;
    (0..points).map(|i| (2.0 * i as f64 - half) / half).collect()
}

fn golden_section_max(
    mut a: f64,
    mut b: f64,
    tol: f64,
    f: &impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `M − Re K^(0)`; `Im K^(0)` is kept alongside (zero up to rounding, since
/// `L^(0)` is Hermitian).
#[derive(Debug, Clone, Serialize)]
pub struct PersonickMatrix {
    pub matrix: RealMatrix,
    pub im_k: RealMatrix,
}

pub fn personick_matrix_bound(avg: &AveragedQuantities) -> Result<PersonickMatrix> {
    let sol = solve_lambda_ld(avg, 0.0)?;
    let matrix = &avg.m - sol.re_k();
    Ok(PersonickMatrix { matrix: (&matrix + matrix.transpose()) * 0.5, im_k: sol.im_k() })
}

/// Scalar Bayes-risk lower bound `Tr[W (M − Re K^(0))]` implied by the
/// Personick matrix inequality.
pub fn personick_scalar(avg: &AveragedQuantities) -> Result<f64> {
    let w = require_constant_weight(avg)?;
    let p = personick_matrix_bound(avg)?;
    Ok((complexify(w) * complexify(&p.matrix)).trace().re)
}
