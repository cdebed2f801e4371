//! Semidefinite programs in a solver-neutral conic form, the backend
//! interface, and the bound formulations built on top of them.
//!
//! A problem is
//!
//! ```text
//! minimize    cᵀx + offset
//! subject to  C_b + Σ_v x_v A_{b,v} ⪰ 0      for every PSD block b
//!             aᵢᵀx = rᵢ                       for every equality i
//! ```
//!
//! where every `C_b` and `A_{b,v}` is a real symmetric matrix given by its
//! upper-triangular coordinate triplets. Complex Hermitian constraints are
//! assembled with [`HermitianLmi`] and lowered through
//! [`real_embedding`](crate::linalg::real_embedding)'s block structure.

mod backend;
mod formulations;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_symmetric, ComplexMatrix, RealMatrix, C64};

pub use backend::{backend_by_name, ClarabelBackend, BACKEND_ENV_VAR};
pub use formulations::{
    bh_lambda_bound, bh_lambda_bound_with_x, bh_lambda_objective, bh_lambda_problem, bh_thetadep_bound,
    bh_thetadep_problem, bnh_bound, bnh_problem, lambda_maximality_check, random_probe, z_lambda, z_theta,
    LambdaMaximalityReport, MAXIMALITY_ENDPOINT_TOL, MAXIMALITY_IDENTITY_TOL, MAXIMALITY_SYMMETRY_TOL,
    MAX_REAL_BLOCK_DIM, MAX_TOTAL_PSD_DIM,
};

/// Default solver tolerance for gap and feasibility.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;

/// Feasibility residual an `Optimal` solution must meet.
pub const OPTIMAL_RESIDUAL_MAX: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Unbounded,
    SolverError,
}

/// One entry `(row, col, value)` of a symmetric matrix with `row <= col`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// `C + Σ_v x_v A_v ⪰ 0` with real symmetric coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdConstraint {
    pub name: String,
    pub dim: usize,
    pub constant: Vec<Triplet>,
    /// `(variable, entry)` pairs; an entry may repeat across variables.
    pub terms: Vec<(usize, Triplet)>,
}

impl PsdConstraint {
    /// Dense value of the affine map at `x`.
    pub fn evaluate(&self, x: &[f64]) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.dim, self.dim);
        let mut put = |t: &Triplet, s: f64| {
            m[(t.row, t.col)] += s * t.value;
            if t.row != t.col {
                m[(t.col, t.row)] += s * t.value;
            }
        };
        for t in &self.constant {
            put(t, 1.0);
        }
        for (v, t) in &self.terms {
            put(t, x[*v]);
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearEquality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdpProblem {
    pub variables: Vec<String>,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub psd: Vec<PsdConstraint>,
    pub equalities: Vec<LinearEquality>,
}

impl SdpProblem {
    pub fn new() -> Self {
        SdpProblem {
            variables: Vec::new(),
            objective: Vec::new(),
            objective_offset: 0.0,
            psd: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> usize {
        self.variables.push(name.into());
        self.objective.push(0.0);
        self.variables.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Total real dimension over all PSD blocks.
    pub fn total_psd_dim(&self) -> usize {
        self.psd.iter().map(|c| c.dim).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_variables();
        if self.objective.len() != n || self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("objective length or values invalid".into()));
        }
        for c in &self.psd {
            let bad = |t: &Triplet| t.row > t.col || t.col >= c.dim || !t.value.is_finite();
            if c.constant.iter().any(bad) || c.terms.iter().any(|(v, t)| *v >= n || bad(t)) {
                return Err(Error::InvalidInput(format!("malformed PSD constraint '{}'", c.name)));
            }
        }
        for e in &self.equalities {
            if e.coeffs.iter().any(|(v, _)| *v >= n) {
                return Err(Error::InvalidInput("equality references unknown variable".into()));
            }
        }
        Ok(())
    }

    /// Objective value (including the offset) at `x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + self.objective_offset
    }

    /// Largest violation over PSD blocks (negative part of the smallest
    /// eigenvalue) and equalities.
    pub fn feasibility_residual(&self, x: &[f64]) -> f64 {
        let psd = self
            .psd
            .iter()
            .map(|c| {
                let (vals, _) = eig_symmetric(&c.evaluate(x));
                (-vals.iter().copied().fold(f64::INFINITY, f64::min)).max(0.0)
            })
            .fold(0.0, f64::max);
        let eq = self
            .equalities
            .iter()
            .map(|e| (e.coeffs.iter().map(|(v, a)| a * x[*v]).sum::<f64>() - e.rhs).abs())
            .fold(0.0, f64::max);
        psd.max(eq)
    }

    /// Text dump for external cross-checks: a variable table followed by the
    /// objective and each constraint as coordinate triplets. Numbers use 17
    /// significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let f = |x: f64| format!("{x:.16e}");
        let _ = writeln!(out, "# bayesbound sdp dump v1");
        let _ = writeln!(out, "# minimize c'x + offset  s.t.  C_b + sum_v x_v A_bv >= 0 (PSD), a_i'x = r_i");
        let _ = writeln!(out, "variables {}", self.num_variables());
        for (i, name) in self.variables.iter().enumerate() {
            let _ = writeln!(out, "var {i} {name}");
        }
        let _ = writeln!(out, "offset {}", f(self.objective_offset));
        for (i, c) in self.objective.iter().enumerate() {
            if *c != 0.0 {
                let _ = writeln!(out, "obj {i} {}", f(*c));
            }
        }
        for (b, c) in self.psd.iter().enumerate() {
            let _ = writeln!(out, "psd {b} {} {}", c.dim, c.name);
            for t in &c.constant {
                let _ = writeln!(out, "const {b} {} {} {}", t.row, t.col, f(t.value));
            }
            for (v, t) in &c.terms {
                let _ = writeln!(out, "coef {b} {v} {} {} {}", t.row, t.col, f(t.value));
            }
        }
        for (i, e) in self.equalities.iter().enumerate() {
            let _ = writeln!(out, "eq {i} {}", f(e.rhs));
            for (v, a) in &e.coeffs {
                let _ = writeln!(out, "eqcoef {i} {v} {}", f(*a));
            }
        }
        out
    }
}

impl Default for SdpProblem {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdpSolution {
    /// Objective value including the offset.
    pub value: f64,
    pub x: Vec<f64>,
    pub status: SolveStatus,
    pub residual: f64,
    pub iterations: u32,
}

impl SdpSolution {
    pub fn is_usable(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

/// A conic solver able to handle [`SdpProblem`]s.
pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &str;

    /// Must be deterministic for fixed inputs and tolerance.
    fn solve(&self, problem: &SdpProblem, tol: f64) -> SdpSolution;
}

/// A complex Hermitian affine matrix `C + Σ_v x_v A_v` of size `dim`,
/// collected entry by entry and lowered to a real symmetric constraint of
/// size `2·dim` via `P + iQ ↦ [[P, −Q], [Q, P]]`.
#[derive(Debug, Clone)]
pub struct HermitianLmi {
    dim: usize,
    /// Keyed by `(variable or usize::MAX for the constant, row, col)`.
    entries: BTreeMap<(usize, usize, usize), C64>,
}

const CONSTANT_KEY: usize = usize::MAX;

impl HermitianLmi {
    pub fn new(dim: usize) -> Self {
        HermitianLmi { dim, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `z` at `(row, col)` of the coefficient of `var` (`None` for the
    /// constant). The caller supplies both halves of every off-diagonal pair.
    pub fn add(&mut self, var: Option<usize>, row: usize, col: usize, z: C64) {
        if z == C64::new(0.0, 0.0) {
            return;
        }
        let key = (var.unwrap_or(CONSTANT_KEY), row, col);
        *self.entries.entry(key).or_insert(C64::new(0.0, 0.0)) += z;
    }

    /// Adds `z` at `(row, col)` and `conj(z)` at `(col, row)`.
    pub fn add_pair(&mut self, var: Option<usize>, row: usize, col: usize, z: C64) {
        if row == col {
            self.add(var, row, col, C64::new(z.re, 0.0));
        } else {
            self.add(var, row, col, z);
            self.add(var, col, row, z.conj());
        }
    }

    pub fn add_constant_matrix(&mut self, offset: usize, m: &ComplexMatrix) {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                self.add(None, offset + i, offset + j, m[(i, j)]);
            }
        }
    }

    /// Lowers to a real PSD constraint, checking Hermiticity of every coefficient.
    pub fn into_constraint(self, name: impl Into<String>) -> Result<PsdConstraint> {
        let name = name.into();
        for (&(v, i, j), z) in &self.entries {
            let mirror = self.entries.get(&(v, j, i)).copied().unwrap_or_default();
            if (mirror - z.conj()).norm() > 1e-12 * z.norm().max(1.0) {
                return Err(Error::InternalInconsistency(format!(
                    "constraint '{name}' is not Hermitian at ({i}, {j})"
                )));
            }
        }
        let m = self.dim;
        let mut real: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        let mut put = |v: usize, r: usize, c: usize, x: f64| {
            if r <= c && x != 0.0 {
                *real.entry((v, r, c)).or_insert(0.0) += x;
            }
        };
        for (&(v, i, j), z) in &self.entries {
            put(v, i, j, z.re);
            put(v, m + i, m + j, z.re);
            put(v, i, m + j, -z.im);
            put(v, m + i, j, z.im);
        }
        let mut constant = Vec::new();
        let mut terms = Vec::new();
        for ((v, row, col), value) in real {
            if value == 0.0 {
                continue;
            }
            let t = Triplet { row, col, value };
            if v == CONSTANT_KEY {
                constant.push(t);
            } else {
                terms.push((v, t));
            }
        }
        Ok(PsdConstraint { name, dim: 2 * m, constant, terms })
    }
}

/// Indices of the `d²` real parameters of a Hermitian `d × d` matrix
/// variable: `d` diagonal entries, then `(Re, Im)` of each `a < b` pair.
#[derive(Debug, Clone, Copy)]
pub struct HermitianVar {
    pub first: usize,
    pub d: usize,
}

impl HermitianVar {
    pub fn allocate(problem: &mut SdpProblem, d: usize, label: &str) -> Self {
        let first = problem.num_variables();
        for a in 0..d {
            problem.add_variable(format!("{label}[{a},{a}]"));
        }
        for a in 0..d {
            for b in (a + 1)..d {
                problem.add_variable(format!("Re {label}[{a},{b}]"));
                problem.add_variable(format!("Im {label}[{a},{b}]"));
            }
        }
        HermitianVar { first, d }
    }

    pub fn count(&self) -> usize {
        self.d * self.d
    }

    /// `(variable, entries of its basis matrix)`; every basis matrix is Hermitian.
    pub fn basis(&self) -> Vec<(usize, Vec<(usize, usize, C64)>)> {
        let d = self.d;
        let mut out = Vec::with_capacity(d * d);
        for a in 0..d {
            out.push((self.first + a, vec![(a, a, C64::new(1.0, 0.0))]));
        }
        let mut v = self.first + d;
        for a in 0..d {
            for b in (a + 1)..d {
                out.push((v, vec![(a, b, C64::new(1.0, 0.0)), (b, a, C64::new(1.0, 0.0))]));
                out.push((v + 1, vec![(a, b, C64::new(0.0, 1.0)), (b, a, C64::new(0.0, -1.0))]));
                v += 2;
            }
        }
        out
    }

    pub fn value(&self, x: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.d, self.d);
        for (v, entries) in self.basis() {
            for (a, b, z) in entries {
                m[(a, b)] += z * x[v];
            }
        }
        m
    }
}

/// Real symmetric `n × n` matrix variable, one parameter per `j <= k`.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricVar {
    pub first: usize,
    pub n: usize,
}

impl SymmetricVar {
    pub fn allocate(problem: &mut SdpProblem, n: usize, label: &str) -> Self {
        let first = problem.num_variables();
        for j in 0..n {
            for k in j..n {
                problem.add_variable(format!("{label}[{j},{k}]"));
            }
        }
        SymmetricVar { first, n }
    }

    /// `(variable, j, k)` with `j <= k`.
    pub fn entries(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut v = self.first;
        for j in 0..self.n {
            for k in j..self.n {
                out.push((v, j, k));
                v += 1;
            }
        }
        out
    }

    pub fn value(&self, x: &[f64]) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.n, self.n);
        for (v, j, k) in self.entries() {
            m[(j, k)] = x[v];
            m[(k, j)] = x[v];
        }
        m
    }
}
