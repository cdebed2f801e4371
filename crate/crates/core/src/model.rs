//! Quantum statistical models, discretized priors, weight matrices, and the
//! prior-averaged operators every bound consumes.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, eig_symmetric, BlockOperator, ComplexMatrix, DensityMatrix, HermitianMatrix, OperatorVector,
    RealMatrix, PSD_CLIP,
};
use crate::quadrature::{rule_on_interval, QuadratureRule};

/// Tolerance used when matching a parameter against a tabulated node.
const NODE_MATCH_TOL: f64 = 1e-12;

/// Tensor-product quadrature is only offered up to this many parameters.
pub const MAX_TENSOR_PARAMS: usize = 3;

type StateFn = dyn Fn(&[f64]) -> Result<DensityMatrix> + Send + Sync;
type WeightFn = dyn Fn(&[f64]) -> RealMatrix + Send + Sync;

/// An `n`-parameter family `θ ↦ S_θ` of `d`-dimensional density matrices.
#[derive(Clone)]
pub struct ModelSpec {
    name: String,
    n_params: usize,
    dim: usize,
    map: Arc<StateFn>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("n_params", &self.n_params)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl ModelSpec {
    pub fn new(
        name: impl Into<String>,
        n_params: usize,
        dim: usize,
        map: impl Fn(&[f64]) -> Result<DensityMatrix> + Send + Sync + 'static,
    ) -> Self {
        ModelSpec { name: name.into(), n_params, dim, map: Arc::new(map) }
    }

    /// A model known only on a finite list of parameter values.
    pub fn from_table(name: impl Into<String>, table: Vec<(Vec<f64>, DensityMatrix)>) -> Result<Self> {
        let first = table
            .first()
            .ok_or_else(|| Error::InvalidInput("model table is empty".into()))?;
        let (n, d) = (first.0.len(), first.1.dim());
        if table.iter().any(|(t, s)| t.len() != n || s.dim() != d) {
            return Err(Error::InvalidInput("model table entries have inconsistent shapes".into()));
        }
        let table = Arc::new(table);
        Ok(Self::new(name, n, d, move |theta| {
            table
                .iter()
                .find(|(t, _)| t.iter().zip(theta).all(|(a, b)| (a - b).abs() <= NODE_MATCH_TOL))
                .map(|(_, s)| s.clone())
                .ok_or_else(|| Error::InvalidInput(format!("no tabulated state at θ = {theta:?}")))
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, theta: &[f64]) -> Result<DensityMatrix> {
        if theta.len() != self.n_params {
            return Err(Error::InvalidInput(format!(
                "model '{}' takes {} parameters, got {}",
                self.name,
                self.n_params,
                theta.len()
            )));
        }
        let s = (self.map)(theta)?;
        if s.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "model '{}' returned a {}-dimensional state, expected {}",
                self.name,
                s.dim(),
                self.dim
            )));
        }
        Ok(s)
    }

    /// States at every node of `prior`.
    pub fn states_on(&self, prior: &PriorNodeSet) -> Result<Vec<DensityMatrix>> {
        prior.nodes().iter().map(|node| self.state(&node.theta)).collect()
    }

    /// Opt-in white-noise mixing `(1 − ε) S_θ + ε I/d`.
    pub fn depolarized(&self, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidInput(format!("depolarization ε = {eps} outside [0, 1]")));
        }
        let inner = self.clone();
        Ok(Self::new(format!("{}+depol({eps})", self.name), self.n_params, self.dim, move |t| {
            Ok(inner.state(t)?.depolarize(eps))
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorNode {
    pub theta: Vec<f64>,
    pub weight: f64,
}

/// A finite prior: distinct nodes with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorNodeSet {
    nodes: Vec<PriorNode>,
}

impl PriorNodeSet {
    /// Validates the nodes and renormalizes the weights to sum to one.
    pub fn new(nodes: Vec<PriorNode>) -> Result<Self> {
        let first = nodes.first().ok_or(Error::DegeneratePrior)?;
        let n = first.theta.len();
        if n == 0 {
            return Err(Error::InvalidInput("prior nodes must have at least one coordinate".into()));
        }
        for node in &nodes {
            if node.theta.len() != n {
                return Err(Error::InvalidInput("prior nodes differ in dimension".into()));
            }
            if !(node.weight > 0.0 && node.weight.is_finite()) {
                return Err(Error::InvalidInput(format!("prior weight {} is not positive", node.weight)));
            }
            if node.theta.iter().any(|t| !t.is_finite()) {
                return Err(Error::InvalidInput("non-finite prior node".into()));
            }
        }
        for (i, a) in nodes.iter().enumerate() {
            if nodes[i + 1..].iter().any(|b| b.theta == a.theta) {
                return Err(Error::InvalidInput(format!("duplicate prior node {:?}", a.theta)));
            }
        }
        let total: f64 = nodes.iter().map(|n| n.weight).sum();
        let nodes = nodes
            .into_iter()
            .map(|n| PriorNode { theta: n.theta, weight: n.weight / total })
            .collect();
        Ok(PriorNodeSet { nodes })
    }

    pub fn point_mass(theta: Vec<f64>) -> Result<Self> {
        Self::new(vec![PriorNode { theta, weight: 1.0 }])
    }

    pub fn nodes(&self) -> &[PriorNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_params(&self) -> usize {
        self.nodes[0].theta.len()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_params()];
        for node in &self.nodes {
            for (mj, tj) in m.iter_mut().zip(&node.theta) {
                *mj += node.weight * tj;
            }
        }
        m
    }

    /// Contracts (or dilates) the nodes about the prior mean by `factor`.
    /// A zero factor collapses the prior to a point mass at the mean.
    pub fn scaled_about_mean(&self, factor: f64) -> Result<Self> {
        let mean = self.mean();
        if factor == 0.0 {
            return Self::point_mass(mean);
        }
        let nodes = self
            .nodes
            .iter()
            .map(|node| PriorNode {
                theta: node.theta.iter().zip(&mean).map(|(t, m)| m + factor * (t - m)).collect(),
                weight: node.weight,
            })
            .collect();
        Self::new(nodes)
    }

    /// Mixture `t·a + (1 − t)·b`; coinciding nodes are merged.
    pub fn mixture(a: &Self, b: &Self, t: f64) -> Result<Self> {
        let mut nodes: Vec<PriorNode> = a
            .nodes
            .iter()
            .map(|n| PriorNode { theta: n.theta.clone(), weight: t * n.weight })
            .collect();
        for n in &b.nodes {
            let w = (1.0 - t) * n.weight;
            match nodes.iter_mut().find(|m| m.theta == n.theta) {
                Some(m) => m.weight += w,
                None => nodes.push(PriorNode { theta: n.theta.clone(), weight: w }),
            }
        }
        nodes.retain(|n| n.weight > 0.0);
        Self::new(nodes)
    }
}

/// Analytic prior densities available to tensor-product quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorDensity {
    Uniform,
    Gaussian { mean: Vec<f64>, std: Vec<f64> },
}

impl PriorDensity {
    pub fn eval(&self, theta: &[f64]) -> f64 {
        match self {
            PriorDensity::Uniform => 1.0,
            PriorDensity::Gaussian { mean, std } => theta
                .iter()
                .zip(mean.iter().zip(std))
                .map(|(t, (m, s))| {
                    let z = (t - m) / s;
                    (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
                })
                .product(),
        }
    }
}

/// A continuous prior together with its discretization recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraturePrior {
    pub density: PriorDensity,
    /// Truncation box, one `[lo, hi]` per parameter.
    pub bounds: Vec<[f64; 2]>,
    pub rule: QuadratureRule,
    pub points: usize,
}

impl QuadraturePrior {
    pub fn discretize(&self) -> Result<PriorNodeSet> {
        quadrature_discretize(|t| self.density.eval(t), &self.bounds, self.rule, self.points)
    }

    pub fn with_points(&self, points: usize) -> Self {
        QuadraturePrior { points, ..self.clone() }
    }
}

/// Tensor-product discretization of `density` on `bounds`: node weights are
/// the rule weights times the density, renormalized. Nodes with zero density
/// are dropped.
pub fn quadrature_discretize(
    density: impl Fn(&[f64]) -> f64,
    bounds: &[[f64; 2]],
    rule: QuadratureRule,
    points_per_axis: usize,
) -> Result<PriorNodeSet> {
    let n = bounds.len();
    if n == 0 || n > MAX_TENSOR_PARAMS {
        return Err(Error::InvalidInput(format!(
            "tensor-product quadrature supports 1..={MAX_TENSOR_PARAMS} parameters, got {n}"
        )));
    }
    if points_per_axis < 2 {
        return Err(Error::InvalidInput("quadrature needs at least 2 points per axis".into()));
    }
    if bounds.iter().any(|[lo, hi]| !(lo < hi)) {
        return Err(Error::InvalidInput("quadrature box must have lo < hi on every axis".into()));
    }
    let axes: Vec<(Vec<f64>, Vec<f64>)> = bounds
        .iter()
        .map(|[lo, hi]| rule_on_interval(rule, points_per_axis, *lo, *hi))
        .collect();

    let total = points_per_axis.pow(n as u32);
    let mut nodes = Vec::with_capacity(total);
    let mut theta = vec![0.0; n];
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for (axis, (x, wx)) in axes.iter().enumerate().rev() {
            let i = rem % points_per_axis;
            rem /= points_per_axis;
            theta[axis] = x[i];
            w *= wx[i];
        }
        let p = density(&theta);
        if p < 0.0 || !p.is_finite() {
            return Err(Error::InvalidInput(format!("prior density {p} at θ = {theta:?} is invalid")));
        }
        if p * w > 0.0 {
            nodes.push(PriorNode { theta: theta.clone(), weight: p * w });
        }
    }
    if nodes.is_empty() {
        return Err(Error::DegeneratePrior);
    }
    PriorNodeSet::new(nodes)
}

/// The weight matrix defining the loss `Tr[W(θ) V_θ]`.
#[derive(Clone)]
pub enum WeightSpec {
    Constant(RealMatrix),
    Varying(Arc<WeightFn>),
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Constant(w) => f.debug_tuple("Constant").field(w).finish(),
            WeightSpec::Varying(_) => f.write_str("Varying(..)"),
        }
    }
}

impl WeightSpec {
    pub fn constant(w: RealMatrix) -> Result<Self> {
        check_spd(&w)?;
        Ok(WeightSpec::Constant(w))
    }

    pub fn identity(n: usize) -> Self {
        WeightSpec::Constant(RealMatrix::identity(n, n))
    }

    pub fn varying(f: impl Fn(&[f64]) -> RealMatrix + Send + Sync + 'static) -> Self {
        WeightSpec::Varying(Arc::new(f))
    }

    /// A weight tabulated on prior nodes.
    pub fn from_table(table: Vec<(Vec<f64>, RealMatrix)>) -> Result<Self> {
        for (_, w) in &table {
            check_spd(w)?;
        }
        let table = Arc::new(table);
        let probe = table.clone();
        let spec = Self::varying(move |theta| {
            probe
                .iter()
                .find(|(t, _)| t.iter().zip(theta).all(|(a, b)| (a - b).abs() <= NODE_MATCH_TOL))
                .map(|(_, w)| w.clone())
                .unwrap_or_else(|| RealMatrix::from_element(1, 1, f64::NAN))
        });
        Ok(spec)
    }

    /// Views a constant weight through the θ-dependent interface.
    pub fn as_varying(&self) -> Self {
        match self {
            WeightSpec::Constant(w) => {
                let w = w.clone();
                Self::varying(move |_| w.clone())
            }
            WeightSpec::Varying(f) => WeightSpec::Varying(f.clone()),
        }
    }

    pub fn constant_matrix(&self) -> Option<&RealMatrix> {
        match self {
            WeightSpec::Constant(w) => Some(w),
            WeightSpec::Varying(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, WeightSpec::Constant(_))
    }

    /// `W(θ)`, validated symmetric positive definite.
    pub fn at(&self, theta: &[f64]) -> Result<RealMatrix> {
        match self {
            WeightSpec::Constant(w) => Ok(w.clone()),
            WeightSpec::Varying(f) => {
                let w = f(theta);
                check_spd(&w).map_err(|e| {
                    Error::InvalidInput(format!("weight at θ = {theta:?} is not SPD: {e}"))
                })?;
                Ok(w)
            }
        }
    }
}

fn check_spd(w: &RealMatrix) -> Result<()> {
    if !w.is_square() || w.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("weight matrix must be square and finite".into()));
    }
    let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if (w - w.transpose()).iter().any(|x| x.abs() > 1e-12 * scale.max(1.0)) {
        return Err(Error::InvalidInput("weight matrix is not symmetric".into()));
    }
    let (vals, _) = eig_symmetric(w);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::InvalidInput(format!("weight matrix has eigenvalue {min:e} <= 0")));
    }
    Ok(())
}

/// Prior-averaged operators.
///
/// `s_b = Σ w_i S_i`, `d_b[j] = Σ w_i θ_ij S_i`, `m_jk = Σ w_i θ_ij θ_ik`,
/// `s_bar[j][k] = Σ w_i W_jk(θ_i) S_i`, `d_bar[j] = Σ w_i Σ_k W_jk(θ_i) θ_ik S_i`,
/// `w_bar = Σ w_i θ_iᵀ W(θ_i) θ_i`.
#[derive(Debug, Clone)]
pub struct AveragedQuantities {
    pub s_b: DensityMatrix,
    pub d_b: OperatorVector,
    pub m: RealMatrix,
    pub w_bar: f64,
    pub s_bar: BlockOperator,
    pub d_bar: OperatorVector,
    /// Present when the weight is parameter independent.
    pub constant_weight: Option<RealMatrix>,
}

impl AveragedQuantities {
    pub fn n_params(&self) -> usize {
        self.d_b.len()
    }

    pub fn dim(&self) -> usize {
        self.s_b.dim()
    }

    /// Rejects rank-deficient averaged states (smallest eigenvalue ≤ `PSD_CLIP`).
    pub fn require_full_rank(&self) -> Result<()> {
        let min = crate::linalg::eig_hermitian(self.s_b.hermitian())?.min_value();
        if min <= PSD_CLIP {
            return Err(Error::SingularAveragedState { min_eigenvalue: min });
        }
        Ok(())
    }
}

pub fn compute_averages(
    model: &ModelSpec,
    prior: &PriorNodeSet,
    weight: &WeightSpec,
) -> Result<AveragedQuantities> {
    let states = model.states_on(prior)?;
    compute_averages_from_states(&states, prior, weight)
}

/// As [`compute_averages`] with the node states already evaluated.
pub fn compute_averages_from_states(
    states: &[DensityMatrix],
    prior: &PriorNodeSet,
    weight: &WeightSpec,
) -> Result<AveragedQuantities> {
    let n = prior.n_params();
    let d = states
        .first()
        .ok_or_else(|| Error::InvalidInput("no states".into()))?
        .dim();
    if states.len() != prior.len() {
        return Err(Error::InvalidInput("state count differs from prior node count".into()));
    }
    if let WeightSpec::Constant(w) = weight {
        if w.nrows() != n {
            return Err(Error::InvalidInput(format!(
                "weight is {}x{} but the model has {n} parameters",
                w.nrows(),
                w.ncols()
            )));
        }
    }

    let mut s_b = ComplexMatrix::zeros(d, d);
    let mut d_b = vec![ComplexMatrix::zeros(d, d); n];
    let mut m = RealMatrix::zeros(n, n);
    let mut w_bar = 0.0;
    let mut s_bar = BlockOperator::zeros(n, d);
    let mut d_bar = vec![ComplexMatrix::zeros(d, d); n];

    for (node, state) in prior.nodes().iter().zip(states) {
        let (wi, theta) = (node.weight, &node.theta);
        let s = state.matrix();
        let w = weight.at(theta)?;
        if w.shape() != (n, n) {
            return Err(Error::InvalidInput(format!(
                "weight is {}x{} but the model has {n} parameters",
                w.nrows(),
                w.ncols()
            )));
        }
        s_b += s * c(wi, 0.);
        for j in 0..n {
            d_b[j] += s * c(wi * theta[j], 0.);
            let wtheta_j: f64 = (0..n).map(|k| w[(j, k)] * theta[k]).sum();
            d_bar[j] += s * c(wi * wtheta_j, 0.);
            w_bar += wi * theta[j] * wtheta_j;
            for k in 0..n {
                m[(j, k)] += wi * theta[j] * theta[k];
                *s_bar.block_mut(j, k) += s * c(wi * w[(j, k)], 0.);
            }
        }
    }

    let s_b = DensityMatrix::from_hermitian(HermitianMatrix::hermitianize(s_b))?;
    let d_b = OperatorVector::new(d_b.into_iter().map(HermitianMatrix::hermitianize).collect())?;
    let d_bar = OperatorVector::new(d_bar.into_iter().map(HermitianMatrix::hermitianize).collect())?;
    let m = (&m + m.transpose()) * 0.5;
    Ok(AveragedQuantities {
        s_b,
        d_b,
        m,
        w_bar,
        s_bar,
        d_bar,
        constant_weight: weight.constant_matrix().cloned(),
    })
}
