//! Ground truth: the classical Bayes-optimal risk on a finite outcome set,
//! the exact Bayes risk of an explicit measurement/estimator pair, and the
//! single-parameter measurement achieving the Personick bound.

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed::solve_lambda_ld;
use crate::error::{Error, Result};
use crate::linalg::{
    c, commutator_norm, eig_hermitian_matrix, eig_symmetric, identity, max_abs, trace_product, ComplexMatrix,
    HermitianMatrix, RealMatrix, C64,
};
use crate::model::{compute_averages_from_states, AveragedQuantities, ModelSpec, PriorNodeSet, WeightSpec};

/// Tolerance on POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-10;

/// Tolerance on classical probability rows summing to one.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Maximum disagreement between the two Bayes-risk formulas.
pub const RISK_AGREEMENT_TOL: f64 = 1e-10;

/// Commutator max-norm below which two states are taken to commute.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Fixed seed of the random real combination used for joint diagonalization.
pub const JOINT_DIAG_SEED: u64 = 0x0c1a_551c;

/// Eigenvalues of `L^(0)` closer than this are merged into one outcome.
pub const EIGEN_MERGE_TOL: f64 = 1e-9;

/// A finite POVM `{Π_x}`.
#[derive(Debug, Clone)]
pub struct Povm {
    outcomes: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(outcomes: Vec<ComplexMatrix>) -> Result<Self> {
        let d = outcomes
            .first()
            .ok_or_else(|| Error::InvalidInput("POVM has no outcomes".into()))?
            .nrows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (x, p) in outcomes.iter().enumerate() {
            if p.shape() != (d, d) {
                return Err(Error::InvalidInput(format!("POVM element {x} has the wrong shape")));
            }
            let h = HermitianMatrix::new(p.clone())?;
            let min = crate::linalg::eig_hermitian(&h)?.min_value();
            if min < -POVM_TOL {
                return Err(Error::NotPsd { min_eigenvalue: min });
            }
            sum += p;
        }
        let dev = max_abs(&(sum - identity(d)));
        if dev > POVM_TOL {
            return Err(Error::InvalidInput(format!("POVM elements sum to I only within {dev:e}")));
        }
        Ok(Povm { outcomes })
    }

    /// The trivial measurement `{I}`.
    pub fn trivial(d: usize) -> Self {
        Povm { outcomes: vec![identity(d)] }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(u: &ComplexMatrix) -> Result<Self> {
        Self::new((0..u.ncols()).map(|k| u.column(k) * u.column(k).adjoint()).collect())
    }

    /// `Π_x = G^{−1/2} A_x† A_x G^{−1/2}` with `A_x` complex Gaussian and
    /// `G = Σ A_x† A_x`.
    pub fn random(dim: usize, outcomes: usize, rng: &mut impl Rng) -> Result<Self> {
        if outcomes == 0 || dim == 0 {
            return Err(Error::InvalidInput("random POVM needs at least one outcome and dimension".into()));
        }
        let gauss = |rng: &mut dyn rand::RngCore| {
            let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
            let r = (-2.0 * u1.ln()).sqrt();
            c(r * (std::f64::consts::TAU * u2).cos(), r * (std::f64::consts::TAU * u2).sin())
        };
        let mats: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let a = ComplexMatrix::from_fn(dim, dim, |_, _| gauss(rng));
                a.adjoint() * a
            })
            .collect();
        let g = mats.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, m| acc + m);
        let eig = eig_hermitian_matrix(&g)?;
        let g_inv_sqrt = eig.reconstruct_with(|v| 1.0 / v.sqrt());
        let elems = mats
            .iter()
            .map(|m| HermitianMatrix::hermitianize(&g_inv_sqrt * m * &g_inv_sqrt).into_matrix())
            .collect();
        Self::new(elems)
    }

    pub fn outcomes(&self) -> &[ComplexMatrix] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].nrows()
    }
}

/// Estimates `θ̂(x)` per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorTable {
    values: Vec<Vec<f64>>,
}

impl EstimatorTable {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.first().map_or(0, Vec::len);
        if n == 0 || values.iter().any(|v| v.len() != n || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput("estimator table needs equal-length finite rows".into()));
        }
        Ok(EstimatorTable { values })
    }

    /// Entries drawn uniformly from the given per-parameter ranges.
    pub fn random(outcomes: usize, ranges: &[[f64; 2]], rng: &mut impl Rng) -> Result<Self> {
        Self::new(
            (0..outcomes)
                .map(|_| ranges.iter().map(|[lo, hi]| rng.gen_range(*lo..=*hi)).collect())
                .collect(),
        )
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn get(&self, x: usize) -> &[f64] {
        &self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_params(&self) -> usize {
        self.values[0].len()
    }
}

/// Likelihoods `p(x|θ_i)` for each prior node over a common outcome set.
#[derive(Debug, Clone)]
pub struct ClassicalModelView {
    probs: Vec<Vec<f64>>,
    /// Common eigenbasis (columns) when the view comes from a quantum model.
    basis: Option<ComplexMatrix>,
}

impl ClassicalModelView {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        let k = probs.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::InvalidInput("classical view needs at least one outcome".into()));
        }
        for (i, row) in probs.iter().enumerate() {
            if row.len() != k || row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidInput(format!("likelihood row {i} is malformed")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > PROBABILITY_TOL {
                return Err(Error::InvalidInput(format!("likelihood row {i} sums to {s}")));
            }
        }
        Ok(ClassicalModelView { probs, basis: None })
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn n_outcomes(&self) -> usize {
        self.probs[0].len()
    }

    /// The projective measurement realizing this view, if it came from a
    /// commuting quantum model.
    pub fn povm(&self) -> Option<Result<Povm>> {
        self.basis.as_ref().map(Povm::from_basis)
    }
}

/// Bayes-optimal risk and estimator for a classical likelihood:
/// `w̄ − Σ_x p(x) d(x)ᵀ W(x)⁻¹ d(x)` with posterior-averaged `W(x)` and `d(x)`.
pub fn classical_optimal_risk(
    view: &ClassicalModelView,
    prior: &PriorNodeSet,
    weight: &WeightSpec,
) -> Result<(f64, EstimatorTable)> {
    if view.probs.len() != prior.len() {
        return Err(Error::InvalidInput("likelihood rows differ from prior node count".into()));
    }
    let n = prior.n_params();
    let weights: Vec<RealMatrix> = prior.nodes().iter().map(|nd| weight.at(&nd.theta)).collect::<Result<_>>()?;
    let w_bar: f64 = prior
        .nodes()
        .iter()
        .zip(&weights)
        .map(|(nd, w)| {
            let t = nalgebra::DVector::from_column_slice(&nd.theta);
            nd.weight * (t.transpose() * w * &t)[(0, 0)]
        })
        .sum();
    let fallback = prior.mean();

    let mut risk = w_bar;
    let mut table = Vec::with_capacity(view.n_outcomes());
    for x in 0..view.n_outcomes() {
        let p_x: f64 = prior.nodes().iter().zip(&view.probs).map(|(nd, row)| nd.weight * row[x]).sum();
        if p_x <= 0.0 {
            debug!("outcome {x} has zero marginal probability; dropped");
            table.push(fallback.clone());
            continue;
        }
        let mut w_post = RealMatrix::zeros(n, n);
        let mut d_post = nalgebra::DVector::<f64>::zeros(n);
        for ((nd, row), w) in prior.nodes().iter().zip(&view.probs).zip(&weights) {
            let q = nd.weight * row[x] / p_x;
            if q == 0.0 {
                continue;
            }
            w_post += w * q;
            d_post += w.transpose() * nalgebra::DVector::from_column_slice(&nd.theta) * q;
        }
        let (vals, _) = eig_symmetric(&w_post);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(0.0, f64::max);
        if min <= 1e-12 * max.max(1.0) {
            return Err(Error::DegenerateWeight { outcome: x });
        }
        let est = w_post.cholesky().ok_or(Error::DegenerateWeight { outcome: x })?.solve(&d_post);
        risk -= p_x * d_post.dot(&est);
        table.push(est.iter().copied().collect());
    }
    Ok((risk, EstimatorTable::new(table)?))
}

/// Exact Bayes risk `Σ_i w_i Σ_x tr[S_i Π_x] (θ̂(x)−θ_i)ᵀ W(θ_i) (θ̂(x)−θ_i)`,
/// cross-checked against the block-operator form
/// `𝕋r[S̄𝕃] − 2 Σ_j tr[D̄_j X_j] + w̄` with `𝕃_jk = Σ_x θ̂_j θ̂_k Π_x`,
/// `X_j = Σ_x θ̂_j Π_x`.
pub fn measured_risk(
    model: &ModelSpec,
    prior: &PriorNodeSet,
    weight: &WeightSpec,
    povm: &Povm,
    est: &EstimatorTable,
) -> Result<f64> {
    if povm.dim() != model.dim() {
        return Err(Error::InvalidInput(format!(
            "POVM dimension {} but model dimension {}",
            povm.dim(),
            model.dim()
        )));
    }
    if est.len() != povm.len() || est.n_params() != model.n_params() {
        return Err(Error::InvalidInput("estimator table does not match POVM and model".into()));
    }
    let states = model.states_on(prior)?;
    let n = model.n_params();

    let mut direct = 0.0;
    for (nd, s) in prior.nodes().iter().zip(&states) {
        let w = weight.at(&nd.theta)?;
        for (x, pi) in povm.outcomes().iter().enumerate() {
            let p = trace_product(s.matrix(), pi).re;
            let err = nalgebra::DVector::from_iterator(n, est.get(x).iter().zip(&nd.theta).map(|(a, b)| a - b));
            direct += nd.weight * p * (err.transpose() * &w * &err)[(0, 0)];
        }
    }

    let avg = compute_averages_from_states(&states, prior, weight)?;
    let lemma = block_form_risk(&avg, povm, est);
    let scale = direct.abs().max(1.0);
    if (direct - lemma).abs() > RISK_AGREEMENT_TOL * scale {
        return Err(Error::InternalInconsistency(format!(
            "Bayes risk forms disagree: direct {direct} vs block form {lemma}"
        )));
    }
    Ok(direct)
}

/// `𝕋r[S̄𝕃] − 2 Σ_j Re tr[D̄_j X_j] + w̄` for the operators built from `(Π, θ̂)`.
pub fn block_form_risk(avg: &AveragedQuantities, povm: &Povm, est: &EstimatorTable) -> f64 {
    let (n, d) = (avg.n_params(), avg.dim());
    let zero = ComplexMatrix::zeros(d, d);
    let x_ops: Vec<ComplexMatrix> = (0..n)
        .map(|j| povm.outcomes().iter().enumerate().fold(zero.clone(), |acc, (x, pi)| acc + pi * c(est.get(x)[j], 0.)))
        .collect();
    let mut quad = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            let l_kj = povm
                .outcomes()
                .iter()
                .enumerate()
                .fold(zero.clone(), |acc, (x, pi)| acc + pi * c(est.get(x)[k] * est.get(x)[j], 0.));
            quad += trace_product(avg.s_bar.block(j, k), &l_kj);
        }
    }
    let cross: f64 = (0..n).map(|j| trace_product(avg.d_bar.get(j).matrix(), &x_ops[j]).re).sum();
    quad.re - 2.0 * cross + avg.w_bar
}

/// For one parameter: the spectral measurement of `L^(0)` with its
/// eigenvalues as estimates. Degenerate eigenspaces are merged into one
/// outcome.
pub fn personick_achieving_measurement(avg: &AveragedQuantities) -> Result<(Povm, EstimatorTable)> {
    if avg.n_params() != 1 {
        return Err(Error::InvalidInput(format!(
            "Personick measurement needs one parameter, got {}",
            avg.n_params()
        )));
    }
    let sol = solve_lambda_ld(avg, 0.0)?;
    let l = HermitianMatrix::hermitianize(sol.l[0].clone());
    let eig = crate::linalg::eig_hermitian(&l)?;
    let d = avg.dim();
    let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    let mut projectors: Vec<ComplexMatrix> = Vec::new();
    let mut estimates: Vec<Vec<f64>> = Vec::new();
    let mut group_vals: Vec<f64> = Vec::new();
    // Eigenvalues are sorted, so degenerate ones are adjacent.
    for k in 0..d {
        let v = eig.values[k];
        let col = eig.vectors.column(k);
        let proj = &col * col.adjoint();
        match group_vals.last() {
            Some(&prev) if (prev - v).abs() <= EIGEN_MERGE_TOL * scale => {
                *projectors.last_mut().unwrap() += proj;
            }
            _ => {
                projectors.push(proj);
                estimates.push(vec![v]);
            }
        }
        group_vals.push(v);
    }
    // Merged outcomes report the mean of their eigenvalues.
    let mut idx = 0;
    for (g, e) in estimates.iter_mut().enumerate() {
        let rank = trace_product(&projectors[g], &identity(d)).re.round() as usize;
        e[0] = group_vals[idx..idx + rank].iter().sum::<f64>() / rank as f64;
        idx += rank;
    }
    Ok((Povm::new(projectors)?, EstimatorTable::new(estimates)?))
}

/// Reads a commuting model as a classical likelihood over its common
/// eigenbasis.
pub fn classical_view_of_commuting_model(model: &ModelSpec, prior: &PriorNodeSet) -> Result<ClassicalModelView> {
    let states = model.states_on(prior)?;
    let mut worst: f64 = 0.0;
    for (a, sa) in states.iter().enumerate() {
        for sb in &states[a + 1..] {
            worst = worst.max(commutator_norm(sa.matrix(), sb.matrix()));
        }
    }
    if worst > COMMUTATION_TOL {
        return Err(Error::NotClassical { commutator_norm: worst });
    }
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(JOINT_DIAG_SEED);
    let combo = states
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, s| acc + s.matrix() * c(rng.gen_range(0.5..1.5), 0.));
    let u = eig_hermitian_matrix(&combo)?.vectors;
    let mut probs = Vec::with_capacity(states.len());
    let mut residual: f64 = 0.0;
    for s in &states {
        let rot = u.adjoint() * s.matrix() * &u;
        let mut off = rot.clone();
        off.fill_diagonal(c(0., 0.));
        residual = residual.max(max_abs(&off));
        probs.push(rot.diagonal().iter().map(|z| z.re.max(0.0)).collect::<Vec<f64>>());
    }
    if residual > 1e-8 {
        return Err(Error::NotClassical { commutator_norm: residual });
    }
    for row in &mut probs {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= s);
    }
    let mut view = ClassicalModelView::new(probs)?;
    view.basis = Some(u);
    Ok(view)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{bld_bound, direct_bound};
    use crate::linalg::{pauli, DensityMatrix};
    use crate::model::{compute_averages, PriorNode};

    fn two_point(a: f64, b: f64) -> PriorNodeSet {
        PriorNodeSet::new(vec![
            PriorNode { theta: vec![a], weight: 0.5 },
            PriorNode { theta: vec![b], weight: 0.5 },
        ])
        .unwrap()
    }

    fn coin() -> (ModelSpec, PriorNodeSet) {
        let model = ModelSpec::new("coin", 1, 2, |t| DensityMatrix::from_bloch([0., 0., 0.5 * t[0]]));
        (model, two_point(-1.0, 1.0))
    }

    #[test]
    fn noiseless_channel() {
        let view = ClassicalModelView::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (risk, est) = classical_optimal_risk(&view, &two_point(0.0, 1.0), &WeightSpec::identity(1)).unwrap();
        assert!(risk.abs() < 1e-15);
        assert_eq!(est.values(), &[vec![0.0], vec![1.0]]);
    }

    #[test]
    fn binary_symmetric_channel() {
        let eps = 0.1;
        let view = ClassicalModelView::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).unwrap();
        let prior = two_point(0.0, 1.0);
        let (risk, est) = classical_optimal_risk(&view, &prior, &WeightSpec::identity(1)).unwrap();
        assert!((risk - eps * (1.0 - eps)).abs() < 1e-15);
        assert!((est.get(0)[0] - eps).abs() < 1e-15 && (est.get(1)[0] - (1.0 - eps)).abs() < 1e-15);
        let w2 = WeightSpec::constant(RealMatrix::from_element(1, 1, 2.0)).unwrap();
        let (risk2, est2) = classical_optimal_risk(&view, &prior, &w2).unwrap();
        assert!((risk2 - 2.0 * risk).abs() < 1e-15);
        for x in 0..2 {
            assert!((est.get(x)[0] - est2.get(x)[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_probability_outcome_is_dropped() {
        let view = ClassicalModelView::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let (risk, est) = classical_optimal_risk(&view, &two_point(0.0, 1.0), &WeightSpec::identity(1)).unwrap();
        assert!(risk.abs() < 1e-15);
        assert_eq!(est.len(), 3);
    }

    #[test]
    fn view_validation() {
        assert!(ClassicalModelView::new(vec![vec![0.5, 0.4]]).is_err());
        assert!(ClassicalModelView::new(vec![vec![1.5, -0.5]]).is_err());
    }

    #[test]
    fn coin_measured_risk() {
        let (model, prior) = coin();
        let povm = Povm::from_basis(&identity(2)).unwrap();
        let est = EstimatorTable::new(vec![vec![0.5], vec![-0.5]]).unwrap();
        let r = measured_risk(&model, &prior, &WeightSpec::identity(1), &povm, &est).unwrap();
        assert!((r - 0.75).abs() < 1e-14);
    }

    #[test]
    fn constant_estimator_point_mass() {
        let model = ModelSpec::new("xy", 2, 2, |t| DensityMatrix::from_bloch([0.4 * t[0], 0.4 * t[1], 0.5]));
        let prior = PriorNodeSet::point_mass(vec![0.2, -0.7]).unwrap();
        let est = EstimatorTable::new(vec![vec![0.2, -0.7]]).unwrap();
        let r = measured_risk(&model, &prior, &WeightSpec::identity(2), &Povm::trivial(2), &est).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn trivial_measurement_best_constant() {
        // With no information the best constant is the prior mean and the
        // risk is the prior variance weighted by W.
        let (model, prior) = coin();
        let w = WeightSpec::constant(RealMatrix::from_element(1, 1, 3.0)).unwrap();
        let r = measured_risk(&model, &prior, &w, &Povm::trivial(2), &EstimatorTable::new(vec![vec![0.0]]).unwrap())
            .unwrap();
        assert!((r - 3.0).abs() < 1e-14);
    }

    #[test]
    fn random_povm_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, k) in [(2, 2), (2, 5), (3, 4)] {
            let p = Povm::random(d, k, &mut rng).unwrap();
            assert_eq!((p.dim(), p.len()), (d, k));
        }
        assert!(Povm::new(vec![identity(2) * c(0.5, 0.)]).is_err());
        assert!(Povm::new(vec![pauli::z(), identity(2) - pauli::z()]).is_err());
    }

    #[test]
    fn personick_on_coin() {
        let (model, prior) = coin();
        let avg = compute_averages(&model, &prior, &WeightSpec::identity(1)).unwrap();
        let (povm, est) = personick_achieving_measurement(&avg).unwrap();
        let r = measured_risk(&model, &prior, &WeightSpec::identity(1), &povm, &est).unwrap();
        assert!((r - 0.75).abs() < 1e-12);
        assert!((r - bld_bound(&avg, 0.0).unwrap().value).abs() < 1e-12);
        let mut values: Vec<f64> = est.values().iter().map(|v| v[0]).collect();
        values.sort_by(f64::total_cmp);
        assert!((values[0] + 0.5).abs() < 1e-12 && (values[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn personick_point_mass_merges() {
        let model = ModelSpec::new("coin", 1, 2, |t| DensityMatrix::from_bloch([0., 0., 0.5 * t[0]]));
        let prior = PriorNodeSet::point_mass(vec![0.4]).unwrap();
        let avg = compute_averages(&model, &prior, &WeightSpec::identity(1)).unwrap();
        let (povm, est) = personick_achieving_measurement(&avg).unwrap();
        assert_eq!(povm.len(), 1);
        assert!((est.get(0)[0] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn commuting_view_and_collapse() {
        // Non-diagonal but commuting: rotate diagonal states by a fixed unitary.
        let h = (pauli::x() + pauli::z()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.);
        let model = ModelSpec::new("rot", 1, 2, move |t| {
            let diag = DensityMatrix::diagonal(&[0.5 + 0.3 * t[0], 0.5 - 0.3 * t[0]])?;
            DensityMatrix::new(&h * diag.matrix() * &h)
        });
        let prior = PriorNodeSet::new(vec![
            PriorNode { theta: vec![-1.0], weight: 0.3 },
            PriorNode { theta: vec![0.2], weight: 0.3 },
            PriorNode { theta: vec![1.0], weight: 0.4 },
        ])
        .unwrap();
        let w = WeightSpec::identity(1);
        let view = classical_view_of_commuting_model(&model, &prior).unwrap();
        for row in view.probs() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let (risk, est) = classical_optimal_risk(&view, &prior, &w).unwrap();
        let avg = compute_averages(&model, &prior, &w).unwrap();
        assert!((risk - direct_bound(&avg).unwrap().value).abs() < 1e-10);
        let povm = view.povm().unwrap().unwrap();
        assert!((measured_risk(&model, &prior, &w, &povm, &est).unwrap() - risk).abs() < 1e-10);
    }

    #[test]
    fn noncommuting_is_rejected() {
        let model = ModelSpec::new("xz", 1, 2, |t| DensityMatrix::from_bloch([0.5 * t[0], 0., 0.5 * (1.0 - t[0])]));
        let err = classical_view_of_commuting_model(&model, &two_point(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::NotClassical { .. }));
    }
}
