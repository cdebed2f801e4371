//! SDP formulations of the Nagaoka-Hayashi type bound and the Holevo-type
//! bounds. Quadratic constraints are written as Schur-complement LMIs:
//! `A ⪰ F†F  ⇔  [[A, F†], [F, I]] ⪰ 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    HermitianLmi, HermitianVar, SdpProblem, SolverBackend, SymmetricVar,
};
use crate::bound::{BoundValue, SolverInfo};
use crate::closed::lambda_coefficients;
use crate::error::{Error, Result};
use crate::linalg::{
    c, complexify, max_abs_real, sqrt_psd, sqrt_psd_real, trace_norm_real, trace_product, ComplexMatrix,
    HermitianMatrix, RealMatrix, C64,
};
use crate::model::{AveragedQuantities, ModelSpec, PriorNodeSet, WeightSpec};

/// Largest real PSD block any formulation may emit.
pub const MAX_REAL_BLOCK_DIM: usize = 512;

/// Largest total real PSD dimension of one problem.
pub const MAX_TOTAL_PSD_DIM: usize = 8192;

fn check_size(problem: &SdpProblem) -> Result<()> {
    if let Some(big) = problem.psd.iter().map(|c| c.dim).max() {
        if big > MAX_REAL_BLOCK_DIM {
            return Err(Error::ProblemTooLarge { size: big, limit: MAX_REAL_BLOCK_DIM });
        }
    }
    let total = problem.total_psd_dim();
    if total > MAX_TOTAL_PSD_DIM {
        return Err(Error::ProblemTooLarge { size: total, limit: MAX_TOTAL_PSD_DIM });
    }
    Ok(())
}

fn solve_to_bound(
    problem: &SdpProblem,
    backend: &dyn SolverBackend,
    tol: f64,
    name: &str,
) -> Result<(BoundValue, Vec<f64>)> {
    let sol = backend.solve(problem, tol);
    if !sol.is_usable() {
        return Err(Error::Solver {
            status: sol.status,
            message: format!("{name}: backend '{}' returned {:?}", backend.name(), sol.status),
        });
    }
    let info = SolverInfo {
        backend: backend.name().to_string(),
        status: sol.status,
        residual: sol.residual,
        iterations: sol.iterations,
    };
    Ok((BoundValue::new(name, sol.value, tol).with_solver(info), sol.x))
}

/// `Re tr[D E]` for every basis element of a Hermitian variable.
fn linear_trace_coeffs(var: &HermitianVar, d: &ComplexMatrix) -> Vec<(usize, f64)> {
    var.basis()
        .into_iter()
        .map(|(v, entries)| {
            let t: C64 = entries.iter().map(|&(a, b, z)| d[(b, a)] * z).sum();
            (v, t.re)
        })
        .collect()
}

/// Problem for the Bayesian Nagaoka-Hayashi bound:
/// minimize `𝕋r[S̄𝕃] − 2 Σ_j tr[D̄_j X_j] + w̄` over `𝕃_jk = 𝕃_kj` Hermitian,
/// `X_j` Hermitian, subject to `[[𝕃, X], [X^{T1}, I]] ⪰ 0`.
pub fn bnh_problem(avg: &AveragedQuantities) -> Result<(SdpProblem, Vec<HermitianVar>)> {
    let (n, d) = (avg.n_params(), avg.dim());
    let mut problem = SdpProblem::new();
    problem.objective_offset = avg.w_bar;

    // 𝕃 blocks for j <= k.
    let mut l_vars = Vec::new();
    for j in 0..n {
        for k in j..n {
            l_vars.push(((j, k), HermitianVar::allocate(&mut problem, d, &format!("L{j}{k}"))));
        }
    }
    let x_vars: Vec<HermitianVar> =
        (0..n).map(|j| HermitianVar::allocate(&mut problem, d, &format!("X{j}"))).collect();

    let mut lmi = HermitianLmi::new((n + 1) * d);
    for &((j, k), var) in &l_vars {
        let mut s_sum = avg.s_bar.block(j, k).clone();
        if j != k {
            s_sum += avg.s_bar.block(k, j);
        }
        for (v, coeff) in linear_trace_coeffs(&var, &s_sum) {
            problem.objective[v] += coeff;
        }
        for (v, entries) in var.basis() {
            for &(a, b, z) in &entries {
                lmi.add(Some(v), j * d + a, k * d + b, z);
                if j != k {
                    lmi.add(Some(v), k * d + a, j * d + b, z);
                }
            }
        }
    }
    for (j, var) in x_vars.iter().enumerate() {
        for (v, coeff) in linear_trace_coeffs(var, avg.d_bar.get(j).matrix()) {
            problem.objective[v] -= 2.0 * coeff;
        }
        for (v, entries) in var.basis() {
            for &(a, b, z) in &entries {
                lmi.add(Some(v), j * d + a, n * d + b, z);
                lmi.add(Some(v), n * d + a, j * d + b, z);
            }
        }
    }
    for a in 0..d {
        lmi.add(None, n * d + a, n * d + a, c(1., 0.));
    }
    problem.psd.push(lmi.into_constraint("L >= X X^T1")?);
    check_size(&problem)?;
    Ok((problem, x_vars))
}

pub fn bnh_bound(avg: &AveragedQuantities, backend: &dyn SolverBackend, tol: f64) -> Result<BoundValue> {
    let (problem, _) = bnh_problem(avg)?;
    Ok(solve_to_bound(&problem, backend, tol, "bnh")?.0)
}

/// `Z^(λ)(X)_ij = ((1+λ)/2) tr(X_i S X_j) + ((1−λ)/2) tr(X_j S X_i)`.
pub fn z_lambda(s: &ComplexMatrix, x: &[ComplexMatrix], lambda: f64) -> ComplexMatrix {
    let (alpha, beta) = lambda_coefficients(lambda);
    let n = x.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        trace_product(&(&x[i] * s), &x[j]) * alpha + trace_product(&(&x[j] * s), &x[i]) * beta
    })
}

/// Objective of the constant-weight Holevo-type bound at a fixed `X`:
/// `Tr[W Re Z] + Tr|√W Im Z √W| − 2 Σ_jk W_jk tr[D_B,k X_j] + Tr[WM]`.
pub fn bh_lambda_objective(avg: &AveragedQuantities, lambda: f64, x: &[ComplexMatrix]) -> Result<f64> {
    let w = avg.constant_weight.as_ref().ok_or(Error::UnsupportedWeight)?;
    let sqrt_w = sqrt_psd_real(w)?;
    let z = z_lambda(avg.s_b.matrix(), x, lambda);
    let re = z.map(|v| v.re);
    let im = z.map(|v| v.im);
    let cross: f64 = (0..x.len()).map(|j| trace_product(avg.d_bar.get(j).matrix(), &x[j]).re).sum();
    Ok((w * re).trace() + trace_norm_real(&(&sqrt_w * im * &sqrt_w))? - 2.0 * cross + avg.w_bar)
}

/// Problem for the constant-weight Holevo-type family: minimize
/// `Tr[WV] − 2 Σ_jk W_jk tr[D_B,k X_j] + Tr[WM]` over real symmetric `V` and
/// Hermitian `X_j` with `V ⪰ Z^(λ)(X)`. `Z^(λ) = F†F` where column `i` of `F`
/// stacks `√((1+λ)/2) vec(√S_B X_i)` over `√((1−λ)/2) vec(X_i √S_B)`.
pub fn bh_lambda_problem(avg: &AveragedQuantities, lambda: f64) -> Result<(SdpProblem, Vec<HermitianVar>)> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("λ = {lambda} outside [-1, 1]")));
    }
    let w = avg.constant_weight.as_ref().ok_or(Error::UnsupportedWeight)?;
    let (n, d) = (avg.n_params(), avg.dim());
    let sqrt_s = sqrt_psd(avg.s_b.hermitian())?;
    let sqrt_s = sqrt_s.matrix();
    let (alpha, beta) = lambda_coefficients(lambda);

    let mut problem = SdpProblem::new();
    problem.objective_offset = avg.w_bar;
    let v_var = SymmetricVar::allocate(&mut problem, n, "V");
    let x_vars: Vec<HermitianVar> =
        (0..n).map(|j| HermitianVar::allocate(&mut problem, d, &format!("X{j}"))).collect();

    for (v, j, k) in v_var.entries() {
        problem.objective[v] = if j == k { w[(j, k)] } else { 2.0 * w[(j, k)] };
    }
    for (j, var) in x_vars.iter().enumerate() {
        for (v, coeff) in linear_trace_coeffs(var, avg.d_bar.get(j).matrix()) {
            problem.objective[v] -= 2.0 * coeff;
        }
    }

    let halves: Vec<(f64, bool)> = [(alpha, true), (beta, false)]
        .into_iter()
        .filter(|(coef, _)| *coef > 0.0)
        .collect();
    let f_rows = halves.len() * d * d;
    let mut lmi = HermitianLmi::new(n + f_rows);
    for (v, j, k) in v_var.entries() {
        lmi.add_pair(Some(v), j, k, c(1., 0.));
    }
    for r in 0..f_rows {
        lmi.add(None, n + r, n + r, c(1., 0.));
    }
    for (i, var) in x_vars.iter().enumerate() {
        for (v, entries) in var.basis() {
            for (h, &(coef, left)) in halves.iter().enumerate() {
                let s = coef.sqrt();
                let mut f = ComplexMatrix::zeros(d, d);
                for &(a, b, z) in &entries {
                    if left {
                        // √S E: column b gets √S[:, a] z.
                        for r in 0..d {
                            f[(r, b)] += sqrt_s[(r, a)] * z;
                        }
                    } else {
                        // E √S: row a gets z √S[b, :].
                        for col in 0..d {
                            f[(a, col)] += z * sqrt_s[(b, col)];
                        }
                    }
                }
                for p in 0..d {
                    for q in 0..d {
                        let val = f[(p, q)] * s;
                        if val != c(0., 0.) {
                            let row = n + h * d * d + p * d + q;
                            lmi.add_pair(Some(v), row, i, val);
                        }
                    }
                }
            }
        }
    }
    problem.psd.push(lmi.into_constraint("V >= Z(X)")?);
    check_size(&problem)?;
    Ok((problem, x_vars))
}

pub fn bh_lambda_bound(
    avg: &AveragedQuantities,
    lambda: f64,
    backend: &dyn SolverBackend,
    tol: f64,
) -> Result<BoundValue> {
    let (problem, _) = bh_lambda_problem(avg, lambda)?;
    let (b, _) = solve_to_bound(&problem, backend, tol, "bh_lambda")?;
    Ok(b.with_lambda(lambda))
}

/// As [`bh_lambda_bound`], also returning the optimal `X`.
pub fn bh_lambda_bound_with_x(
    avg: &AveragedQuantities,
    lambda: f64,
    backend: &dyn SolverBackend,
    tol: f64,
) -> Result<(BoundValue, Vec<ComplexMatrix>)> {
    let (problem, x_vars) = bh_lambda_problem(avg, lambda)?;
    let (b, x) = solve_to_bound(&problem, backend, tol, "bh_lambda")?;
    Ok((b.with_lambda(lambda), x_vars.iter().map(|v| v.value(&x)).collect()))
}

/// Problem for the θ-dependent-weight Holevo-type bound: minimize
/// `Σ_i w_i Tr V_i − 2 Σ_j tr[D̄_j X_j] + w̄` subject to `V_i ⪰ Z_{θ_i}(X)` at every
/// prior node, with `Z_θ(X)_jk = tr[S_θ Y_j Y_k]`, `Y_j = Σ_a √W(θ)_aj X_a`.
/// Each node contributes the Schur block of `F_i`, column `j` = `vec(Y_j √S_θi)`.
pub fn bh_thetadep_problem(
    avg: &AveragedQuantities,
    model: &ModelSpec,
    prior: &PriorNodeSet,
    weight: &WeightSpec,
) -> Result<(SdpProblem, Vec<HermitianVar>)> {
    let (n, d) = (avg.n_params(), avg.dim());
    if model.n_params() != n || prior.n_params() != n || model.dim() != d {
        return Err(Error::InvalidInput("model, prior and averages disagree in shape".into()));
    }
    let projected = prior.len() * 2 * (n + d * d);
    if projected > MAX_TOTAL_PSD_DIM {
        return Err(Error::ProblemTooLarge { size: projected, limit: MAX_TOTAL_PSD_DIM });
    }
    let mut problem = SdpProblem::new();
    problem.objective_offset = avg.w_bar;
    let x_vars: Vec<HermitianVar> =
        (0..n).map(|j| HermitianVar::allocate(&mut problem, d, &format!("X{j}"))).collect();
    for (j, var) in x_vars.iter().enumerate() {
        for (v, coeff) in linear_trace_coeffs(var, avg.d_bar.get(j).matrix()) {
            problem.objective[v] -= 2.0 * coeff;
        }
    }

    for (i, node) in prior.nodes().iter().enumerate() {
        let state = model.state(&node.theta)?;
        let sqrt_s = sqrt_psd(state.hermitian())?;
        let sqrt_s = sqrt_s.matrix();
        let sqrt_w = sqrt_psd_real(&weight.at(&node.theta)?)?;
        let v_var = SymmetricVar::allocate(&mut problem, n, &format!("V{i}"));
        for (v, j, k) in v_var.entries() {
            if j == k {
                problem.objective[v] = node.weight;
            }
        }
        let mut lmi = HermitianLmi::new(n + d * d);
        for (v, j, k) in v_var.entries() {
            lmi.add_pair(Some(v), j, k, c(1., 0.));
        }
        for r in 0..d * d {
            lmi.add(None, n + r, n + r, c(1., 0.));
        }
        for (a_idx, var) in x_vars.iter().enumerate() {
            for (v, entries) in var.basis() {
                // E √S, then spread over columns j with weight √W[a_idx, j].
                let mut es = ComplexMatrix::zeros(d, d);
                for &(a, b, z) in &entries {
                    for col in 0..d {
                        es[(a, col)] += z * sqrt_s[(b, col)];
                    }
                }
                for j in 0..n {
                    let wj = sqrt_w[(a_idx, j)];
                    if wj == 0.0 {
                        continue;
                    }
                    for p in 0..d {
                        for q in 0..d {
                            let val = es[(p, q)] * wj;
                            if val != c(0., 0.) {
                                lmi.add_pair(Some(v), n + p * d + q, j, val);
                            }
                        }
                    }
                }
            }
        }
        problem.psd.push(lmi.into_constraint(format!("V{i} >= Z_theta{i}(X)"))?);
    }
    check_size(&problem)?;
    Ok((problem, x_vars))
}

pub fn bh_thetadep_bound(
    avg: &AveragedQuantities,
    model: &ModelSpec,
    prior: &PriorNodeSet,
    weight: &WeightSpec,
    backend: &dyn SolverBackend,
    tol: f64,
) -> Result<BoundValue> {
    let (problem, _) = bh_thetadep_problem(avg, model, prior, weight)?;
    Ok(solve_to_bound(&problem, backend, tol, "bh_thetadep")?.0)
}

/// Tolerances of the λ-maximality report.
pub const MAXIMALITY_ENDPOINT_TOL: f64 = 1e-5;
pub const MAXIMALITY_SYMMETRY_TOL: f64 = 1e-6;
pub const MAXIMALITY_IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct LambdaMaximalityReport {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    /// `max(values) − max(value(−1), value(1))`; at most the endpoint tolerance.
    pub endpoint_excess: f64,
    /// Largest `|value(λ) − value(−λ)|` over pairs present in the grid.
    pub symmetry_gap: f64,
    /// `max_λ ‖Re Z^(λ)(X) − Re Z^(1)(X)‖_max` at the probe `X`.
    pub re_part_deviation: f64,
    /// `max_λ |Tr|Im Z^(λ)(X)| − |λ|·Tr|Im Z^(1)(X)||` at the probe `X`.
    pub im_scaling_deviation: f64,
    pub failures: Vec<String>,
}

impl LambdaMaximalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Seeded random Hermitian operators used as the fixed `X` in identity checks.
pub fn random_probe(n: usize, d: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a = ComplexMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            HermitianMatrix::hermitianize(a).into_matrix()
        })
        .collect()
}

/// Evaluates the constant-weight Holevo-type bound over `grid` (with ±1
/// always included) and checks endpoint maximality, `λ ↔ −λ` symmetry, and
/// the exact Re/Im split of `Z^(λ)` at a fixed probe `X`. Violations are
/// reported, never raised; solver failures are.
pub fn lambda_maximality_check(
    avg: &AveragedQuantities,
    backend: &dyn SolverBackend,
    tol: f64,
    grid: &[f64],
    probe: Option<&[ComplexMatrix]>,
) -> Result<LambdaMaximalityReport> {
    if grid.iter().any(|l| !(-1.0..=1.0).contains(l)) {
        return Err(Error::InvalidInput("λ grid must lie in [-1, 1]".into()));
    }
    let mut lambdas: Vec<f64> = grid.to_vec();
    for end in [-1.0, 1.0] {
        if !lambdas.contains(&end) {
            lambdas.push(end);
        }
    }
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let values = lambdas
        .iter()
        .map(|&l| Ok(bh_lambda_bound(avg, l, backend, tol)?.value))
        .collect::<Result<Vec<f64>>>()?;

    let at = |target: f64| lambdas.iter().position(|&l| l == target).map(|i| values[i]);
    let endpoint = at(1.0).unwrap().max(at(-1.0).unwrap());
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let endpoint_excess = best - endpoint;
    let symmetry_gap = lambdas
        .iter()
        .zip(&values)
        .filter_map(|(&l, &v)| at(-l).map(|m| (v - m).abs()))
        .fold(0.0, f64::max);

    let owned;
    let x = match probe {
        Some(x) => x,
        None => {
            owned = random_probe(avg.n_params(), avg.dim(), 0x5eed);
            &owned
        }
    };
    let s = avg.s_b.matrix();
    let z1 = z_lambda(s, x, 1.0);
    let re1 = z1.map(|v| v.re);
    let im1 = trace_norm_real(&z1.map(|v| v.im))?;
    let mut re_dev: f64 = 0.0;
    let mut im_dev: f64 = 0.0;
    for &l in &lambdas {
        let z = z_lambda(s, x, l);
        re_dev = re_dev.max(max_abs_real(&(z.map(|v| v.re) - &re1)));
        im_dev = im_dev.max((trace_norm_real(&z.map(|v| v.im))? - l.abs() * im1).abs());
    }

    let mut failures = Vec::new();
    if endpoint_excess > MAXIMALITY_ENDPOINT_TOL {
        failures.push(format!("maximum exceeds the λ = ±1 value by {endpoint_excess:e}"));
    }
    if symmetry_gap > MAXIMALITY_SYMMETRY_TOL {
        failures.push(format!("λ ↔ −λ asymmetry {symmetry_gap:e}"));
    }
    if re_dev > MAXIMALITY_IDENTITY_TOL {
        failures.push(format!("Re Z^(λ) varies with λ by {re_dev:e}"));
    }
    if im_dev > MAXIMALITY_IDENTITY_TOL {
        failures.push(format!("Tr|Im Z^(λ)| deviates from |λ| scaling by {im_dev:e}"));
    }
    Ok(LambdaMaximalityReport {
        lambdas,
        values,
        endpoint_excess,
        symmetry_gap,
        re_part_deviation: re_dev,
        im_scaling_deviation: im_dev,
        failures,
    })
}

/// `(√W ⊗ √S)` dressing used by the θ-dependent form, exposed for tests.
pub fn z_theta(s: &ComplexMatrix, w: &RealMatrix, x: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let sqrt_w = complexify(&sqrt_psd_real(w)?);
    let n = x.len();
    let y: Vec<ComplexMatrix> = (0..n)
        .map(|j| (0..n).fold(ComplexMatrix::zeros(s.nrows(), s.ncols()), |acc, a| acc + &x[a] * sqrt_w[(a, j)]))
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| trace_product(s, &(&y[j] * &y[k]))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{bld_bound, direct_bound};
    use crate::linalg::DensityMatrix;
    use crate::model::{compute_averages, quadrature_discretize, PriorNode};
    use crate::quadrature::QuadratureRule;
    use crate::sdp::{ClarabelBackend, DEFAULT_SOLVER_TOL};

    const TOL: f64 = DEFAULT_SOLVER_TOL;

    fn coin() -> (ModelSpec, PriorNodeSet) {
        let model = ModelSpec::new("coin", 1, 2, |t| DensityMatrix::from_bloch([0., 0., 0.5 * t[0]]));
        let prior = PriorNodeSet::new(vec![
            PriorNode { theta: vec![-1.0], weight: 0.5 },
            PriorNode { theta: vec![1.0], weight: 0.5 },
        ])
        .unwrap();
        (model, prior)
    }

    fn xy() -> (ModelSpec, PriorNodeSet) {
        let model = ModelSpec::new("xy", 2, 2, |t| DensityMatrix::from_bloch([t[0], t[1], 0.5]));
        let prior =
            quadrature_discretize(|_| 1.0, &[[-0.4, 0.4], [-0.4, 0.4]], QuadratureRule::GaussLegendre, 3).unwrap();
        (model, prior)
    }

    #[test]
    fn coin_bounds_are_tight() {
        let (model, prior) = coin();
        let w = WeightSpec::identity(1);
        let avg = compute_averages(&model, &prior, &w).unwrap();
        let be = ClarabelBackend::default();
        assert!((bnh_bound(&avg, &be, TOL).unwrap().value - 0.75).abs() < 1e-6);
        for l in [-1.0, 0.0, 0.5, 1.0] {
            assert!((bh_lambda_bound(&avg, l, &be, TOL).unwrap().value - 0.75).abs() < 1e-6);
        }
        let th = bh_thetadep_bound(&avg, &model, &prior, &w.as_varying(), &be, TOL).unwrap();
        assert!((th.value - 0.75).abs() < 1e-5);
    }

    #[test]
    fn point_mass_is_zero() {
        let (model, _) = xy();
        let prior = PriorNodeSet::point_mass(vec![0.1, -0.2]).unwrap();
        let w = WeightSpec::identity(2);
        let avg = compute_averages(&model, &prior, &w).unwrap();
        let be = ClarabelBackend::default();
        assert!(bnh_bound(&avg, &be, TOL).unwrap().value.abs() < 1e-6);
        assert!(bh_lambda_bound(&avg, 1.0, &be, TOL).unwrap().value.abs() < 1e-6);
        assert!(bh_thetadep_bound(&avg, &model, &prior, &w, &be, TOL).unwrap().value.abs() < 1e-6);
    }

    #[test]
    fn noncommuting_ordering() {
        let (model, prior) = xy();
        let w = WeightSpec::constant(RealMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0])).unwrap();
        let avg = compute_averages(&model, &prior, &w).unwrap();
        let be = ClarabelBackend::default();
        let bnh = bnh_bound(&avg, &be, TOL).unwrap().value;
        let direct = direct_bound(&avg).unwrap().value;
        let bh1 = bh_lambda_bound(&avg, 1.0, &be, TOL).unwrap().value;
        let bh0 = bh_lambda_bound(&avg, 0.0, &be, TOL).unwrap().value;
        // λ = 0 has no imaginary part, so the SDP reproduces the closed form.
        assert!((bh0 - bld_bound(&avg, 0.0).unwrap().value).abs() < 1e-6);
        assert!(bh1 >= bld_bound(&avg, 1.0).unwrap().value - 1e-6);
        assert!(bh1 > bh0 + 1e-4, "RLD-type member should be strictly better here");
        assert!(bnh >= bh1 - 1e-6);
        assert!(bh1 >= direct - 1e-6);
        let th = bh_thetadep_bound(&avg, &model, &prior, &w.as_varying(), &be, TOL).unwrap().value;
        assert!((th - bh1).abs() < 1e-5);
    }

    #[test]
    fn objective_at_optimum_matches_solver() {
        let (model, prior) = xy();
        let avg = compute_averages(&model, &prior, &WeightSpec::identity(2)).unwrap();
        let be = ClarabelBackend::default();
        for l in [-0.5, 1.0] {
            let (b, x) = bh_lambda_bound_with_x(&avg, l, &be, TOL).unwrap();
            let direct = bh_lambda_objective(&avg, l, &x).unwrap();
            assert!((direct - b.value).abs() < 1e-6, "λ={l}: {direct} vs {}", b.value);
        }
    }

    #[test]
    fn z_lambda_reflection_is_transpose() {
        let s = DensityMatrix::from_bloch([0.1, 0.2, 0.3]).unwrap().matrix().clone();
        let x = random_probe(2, 2, 7);
        let a = z_lambda(&s, &x, 0.4);
        let b = z_lambda(&s, &x, -0.4);
        assert!(crate::linalg::max_abs(&(a.transpose() - b)) < 1e-14);
        let t = z_theta(&s, &RealMatrix::identity(2, 2), &x).unwrap();
        assert!(crate::linalg::max_abs(&(t.transpose() - z_lambda(&s, &x, 1.0))) < 1e-14);
    }

    #[test]
    fn maximality_report() {
        let (model, prior) = xy();
        let avg = compute_averages(&model, &prior, &WeightSpec::identity(2)).unwrap();
        let r = lambda_maximality_check(&avg, &ClarabelBackend::default(), TOL, &[-0.5, 0.0, 0.5], None).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.lambdas.len(), 5);
        assert!(lambda_maximality_check(&avg, &ClarabelBackend::default(), TOL, &[2.0], None).is_err());
    }

    #[test]
    fn size_limit() {
        let (model, _) = xy();
        let prior =
            quadrature_discretize(|_| 1.0, &[[-0.4, 0.4], [-0.4, 0.4]], QuadratureRule::GaussLegendre, 30).unwrap();
        let w = WeightSpec::identity(2);
        let avg = compute_averages(&model, &prior, &w).unwrap();
        let err = bh_thetadep_problem(&avg, &model, &prior, &w).unwrap_err();
        assert!(matches!(err, Error::ProblemTooLarge { .. }));
    }

    #[test]
    fn bh_requires_constant_weight() {
        let (model, prior) = xy();
        let avg = compute_averages(&model, &prior, &WeightSpec::identity(2).as_varying()).unwrap();
        assert_eq!(bh_lambda_problem(&avg, 0.0).unwrap_err(), Error::UnsupportedWeight);
        assert!(bnh_problem(&avg).is_ok());
    }
}
