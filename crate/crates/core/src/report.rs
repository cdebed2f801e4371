//! Run plans, per-scenario reports, sweeps, and their JSON/CSV encodings.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bound::{BoundValue, SolverInfo};
use crate::catalog::Scenario;
use crate::closed::{bld_bound, bld_max_over_lambda, direct_bound, personick_matrix_bound, DEFAULT_LAMBDA_GRID};
use crate::error::{Error, Result};
use crate::model::{compute_averages, AveragedQuantities, ModelSpec};
use crate::oracle::{
    classical_optimal_risk, classical_view_of_commuting_model, measured_risk, personick_achieving_measurement,
};
use crate::sdp::{bh_lambda_bound, bh_thetadep_bound, bnh_bound, SolverBackend, DEFAULT_SOLVER_TOL};

/// Schema tag carried by every JSON and CSV document.
pub const REPORT_SCHEMA: &str = "bayesbound.report/v1";
pub const SWEEP_SCHEMA: &str = "bayesbound.sweep/v1";

/// Violation allowed by the ordering checks.
pub const ORDERING_TOL: f64 = 1e-5;

pub const DEFAULT_LAMBDAS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Direct,
    Bld,
    BldMax,
    BhLambda,
    BhThetadep,
    Bnh,
    PersonickMatrix,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::Direct,
        BoundKind::Bld,
        BoundKind::BldMax,
        BoundKind::BhLambda,
        BoundKind::BhThetadep,
        BoundKind::Bnh,
        BoundKind::PersonickMatrix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Direct => "direct",
            BoundKind::Bld => "bld",
            BoundKind::BldMax => "bld_max",
            BoundKind::BhLambda => "bh_lambda",
            BoundKind::BhThetadep => "bh_thetadep",
            BoundKind::Bnh => "bnh",
            BoundKind::PersonickMatrix => "personick_matrix",
        }
    }

    /// Whether the bound needs a parameter-independent weight.
    pub fn needs_constant_weight(self) -> bool {
        matches!(self, BoundKind::Bld | BoundKind::BldMax | BoundKind::BhLambda)
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown bound '{s}'")))
    }
}

/// Axis of a sweep with its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum SweepAxis {
    Lambda(Vec<f64>),
    /// Factor applied to node offsets from the prior mean.
    PriorWidth(Vec<f64>),
    /// Quadrature points per axis (scenarios with a quadrature prior).
    NodeCount(Vec<usize>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Lambda(_) => "lambda",
            SweepAxis::PriorWidth(_) => "prior_width",
            SweepAxis::NodeCount(_) => "node_count",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::Lambda(v) | SweepAxis::PriorWidth(v) => v.len(),
            SweepAxis::NodeCount(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn value(&self, i: usize) -> f64 {
        match self {
            SweepAxis::Lambda(v) | SweepAxis::PriorWidth(v) => v[i],
            SweepAxis::NodeCount(v) => v[i] as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub scenarios: Vec<Scenario>,
    pub bounds: Vec<BoundKind>,
    /// λ values for `bld` and `bh_lambda`.
    pub lambdas: Vec<f64>,
    /// Grid size for `bld_max`.
    pub lambda_grid: usize,
    pub tol: f64,
    pub depolarize: Option<f64>,
    pub sweep: Option<SweepAxis>,
    pub config_hash: String,
    /// Wall-clock timings make reports non-reproducible; off by default.
    pub include_timings: bool,
}

impl RunPlan {
    pub fn new(scenarios: Vec<Scenario>) -> Self {
        RunPlan {
            scenarios,
            bounds: BoundKind::ALL.to_vec(),
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            lambda_grid: DEFAULT_LAMBDA_GRID,
            tol: DEFAULT_SOLVER_TOL,
            depolarize: None,
            sweep: None,
            config_hash: String::new(),
            include_timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::Config("plan has no scenarios".into()));
        }
        if self.bounds.is_empty() {
            return Err(Error::Config("plan selects no bounds".into()));
        }
        if self.lambdas.iter().any(|l| !(-1.0..=1.0).contains(l)) {
            return Err(Error::Config("λ values must lie in [-1, 1]".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("solver tolerance {} must be in (0, 1)", self.tol)));
        }
        if let Some(s) = &self.sweep {
            if s.len() < 2 {
                return Err(Error::Config("a sweep axis needs at least two values".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorEntry {
    fn from(e: &Error) -> Self {
        ErrorEntry { kind: e.kind().to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub status: String,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
}

impl BoundEntry {
    fn ok(b: BoundValue) -> Self {
        BoundEntry {
            name: b.name,
            lambda: b.lambda,
            status: "ok".into(),
            value: Some(b.value),
            tolerance: Some(b.tolerance),
            solver: b.solver,
            matrix: None,
            notes: b.notes,
            error: None,
            time_ms: None,
        }
    }

    fn failed(name: &str, lambda: Option<f64>, e: &Error) -> Self {
        BoundEntry {
            name: name.into(),
            lambda,
            status: "error".into(),
            value: None,
            tolerance: None,
            solver: None,
            matrix: None,
            notes: Vec::new(),
            error: Some(e.into()),
            time_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; negative beyond the tolerance is a violation.
    pub margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEntry {
    pub name: String,
    pub status: String,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub description: String,
    pub n_params: usize,
    pub dim: usize,
    pub prior_nodes: usize,
    pub weight: String,
    /// Truncation box and rule when the prior came from a density.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<crate::model::QuadraturePrior>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depolarize: Option<f64>,
    pub bounds: Vec<BoundEntry>,
    pub ordering: Vec<OrderingCheck>,
    pub oracles: Vec<OracleEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorEntry>,
}

impl ScenarioReport {
    pub fn bound(&self, name: &str, lambda: Option<f64>) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.name == name && (lambda.is_none() || b.lambda == lambda))
    }

    pub fn value(&self, name: &str, lambda: Option<f64>) -> Option<f64> {
        self.bound(name, lambda).and_then(|b| b.value)
    }

    pub fn ordering_passed(&self) -> bool {
        self.ordering.iter().all(|o| o.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub schema: String,
    pub version: String,
    pub config_hash: String,
    pub backend: String,
    pub solver_tol: f64,
    pub lambdas: Vec<f64>,
    pub scenarios: Vec<ScenarioReport>,
}

fn timed<T>(include: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let start = Instant::now();
    let out = f();
    (out, include.then(|| start.elapsed().as_secs_f64() * 1e3))
}

fn push_result(out: &mut Vec<BoundEntry>, name: &str, lambda: Option<f64>, r: Result<BoundValue>, t: Option<f64>) {
    let mut entry = match r {
        Ok(b) => BoundEntry::ok(b),
        Err(e) => BoundEntry::failed(name, lambda, &e),
    };
    entry.time_ms = t;
    out.push(entry);
}

fn compute_bounds(
    plan: &RunPlan,
    model: &ModelSpec,
    scenario: &Scenario,
    avg: &AveragedQuantities,
    backend: &dyn SolverBackend,
) -> Vec<BoundEntry> {
    let mut out = Vec::new();
    let timing = plan.include_timings;
    for &kind in &plan.bounds {
        match kind {
            BoundKind::Direct => {
                let (r, t) = timed(timing, || direct_bound(avg));
                push_result(&mut out, kind.name(), None, r, t);
            }
            BoundKind::Bld => {
                for &l in &plan.lambdas {
                    let (r, t) = timed(timing, || bld_bound(avg, l));
                    push_result(&mut out, kind.name(), Some(l), r, t);
                }
            }
            BoundKind::BldMax => {
                let (r, t) = timed(timing, || bld_max_over_lambda(avg, plan.lambda_grid).map(|(b, _)| b));
                push_result(&mut out, kind.name(), None, r, t);
            }
            BoundKind::BhLambda => {
                for &l in &plan.lambdas {
                    let (r, t) = timed(timing, || bh_lambda_bound(avg, l, backend, plan.tol));
                    push_result(&mut out, kind.name(), Some(l), r, t);
                }
            }
            BoundKind::BhThetadep => {
                let (r, t) = timed(timing, || {
                    bh_thetadep_bound(avg, model, &scenario.prior, &scenario.weight, backend, plan.tol)
                });
                push_result(&mut out, kind.name(), None, r, t);
            }
            BoundKind::Bnh => {
                let (r, t) = timed(timing, || bnh_bound(avg, backend, plan.tol));
                push_result(&mut out, kind.name(), None, r, t);
            }
            BoundKind::PersonickMatrix => {
                let (r, t) = timed(timing, || personick_matrix_bound(avg));
                let mut entry = match r {
                    Ok(p) => {
                        let rows = (0..p.matrix.nrows())
                            .map(|i| (0..p.matrix.ncols()).map(|j| p.matrix[(i, j)]).collect())
                            .collect();
                        // The scalar Tr[W P] exists only for a constant weight.
                        let value = avg.constant_weight.as_ref().map(|w| (w * &p.matrix).trace());
                        let mut e = BoundEntry::ok(BoundValue::new(kind.name(), value.unwrap_or(f64::NAN), 1e-9));
                        e.value = value;
                        e.matrix = Some(rows);
                        let im = crate::linalg::max_abs_real(&p.im_k);
                        e.notes.push(format!("max |Im K^(0)| = {im:.3e}"));
                        if value.is_none() {
                            e.notes.push("scalar value requires a constant weight".into());
                        }
                        e
                    }
                    Err(e) => BoundEntry::failed(kind.name(), None, &e),
                };
                entry.time_ms = t;
                out.push(entry);
            }
        }
    }
    out
}

fn ordering_checks(report: &ScenarioReport, lambdas: &[f64]) -> Vec<OrderingCheck> {
    let mut checks = Vec::new();
    let mut check = |relation: String, lhs: Option<f64>, rhs: Option<f64>| {
        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
            let margin = lhs - rhs;
            checks.push(OrderingCheck { relation, lhs, rhs, margin, tolerance: ORDERING_TOL, passed: margin >= -ORDERING_TOL });
        }
    };
    let bnh = report.value("bnh", None);
    let direct = report.value("direct", None);
    for &l in lambdas {
        let bh = report.value("bh_lambda", Some(l));
        check(format!("bnh >= bh_lambda({l})"), bnh, bh);
        check(format!("bh_lambda({l}) >= bld({l})"), bh, report.value("bld", Some(l)));
        check(format!("bh_lambda({l}) >= direct"), bh, direct);
    }
    check("bnh >= bh_thetadep".into(), bnh, report.value("bh_thetadep", None));
    checks
}

fn oracle_entries(model: &ModelSpec, scenario: &Scenario, avg: &AveragedQuantities) -> Vec<OracleEntry> {
    let mut out = Vec::new();
    let entry = |name: &str, r: Result<f64>| match r {
        Ok(v) => OracleEntry { name: name.into(), status: "ok".into(), value: Some(v), error: None },
        Err(e) => OracleEntry { name: name.into(), status: "error".into(), value: None, error: Some((&e).into()) },
    };
    if let Ok(view) = classical_view_of_commuting_model(model, &scenario.prior) {
        out.push(entry(
            "classical_optimal_risk",
            classical_optimal_risk(&view, &scenario.prior, &scenario.weight).map(|(r, _)| r),
        ));
    }
    if model.n_params() == 1 {
        out.push(entry(
            "personick_measured_risk",
            personick_achieving_measurement(avg)
                .and_then(|(povm, est)| measured_risk(model, &scenario.prior, &scenario.weight, &povm, &est)),
        ));
    }
    out
}

pub fn run_scenario(plan: &RunPlan, scenario: &Scenario, backend: &dyn SolverBackend) -> ScenarioReport {
    let mut report = ScenarioReport {
        name: scenario.name.clone(),
        description: scenario.description.clone(),
        n_params: scenario.model.n_params(),
        dim: scenario.model.dim(),
        prior_nodes: scenario.prior.len(),
        weight: if scenario.weight.is_constant() { "constant" } else { "varying" }.into(),
        quadrature: scenario.quadrature.clone(),
        depolarize: plan.depolarize,
        bounds: Vec::new(),
        ordering: Vec::new(),
        oracles: Vec::new(),
        error: None,
    };
    let model = match plan.depolarize {
        Some(eps) => match scenario.model.depolarized(eps) {
            Ok(m) => m,
            Err(e) => {
                report.error = Some((&e).into());
                return report;
            }
        },
        None => scenario.model.clone(),
    };
    let avg = match compute_averages(&model, &scenario.prior, &scenario.weight) {
        Ok(a) => a,
        Err(e) => {
            report.error = Some((&e).into());
            return report;
        }
    };
    report.bounds = compute_bounds(plan, &model, scenario, &avg, backend);
    report.ordering = ordering_checks(&report, &plan.lambdas);
    report.oracles = oracle_entries(&model, scenario, &avg);
    report
}

/// Executes every requested bound on every scenario. Per-bound failures are
/// recorded in the report and never abort sibling computations.
pub fn run(plan: &RunPlan, backend: &dyn SolverBackend) -> Result<BoundReport> {
    plan.validate()?;
    // Scenarios are independent; results are collected in input order.
    let scenarios = std::thread::scope(|scope| {
        let handles: Vec<_> =
            plan.scenarios.iter().map(|s| scope.spawn(move || run_scenario(plan, s, backend))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario worker panicked")).collect()
    });
    Ok(BoundReport {
        schema: REPORT_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: plan.config_hash.clone(),
        backend: backend.name().into(),
        solver_tol: plan.tol,
        lambdas: plan.lambdas.clone(),
        scenarios,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: String,
    pub axis_value: f64,
    pub bound: String,
    pub lambda: Option<f64>,
    pub value: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: String,
    pub version: String,
    pub config_hash: String,
    pub backend: String,
    pub axis: String,
    pub rows: Vec<SweepRow>,
}

/// One report per axis value, flattened into rows
/// `(scenario, axis value, bound, λ, value, status)`.
pub fn sweep(plan: &RunPlan, backend: &dyn SolverBackend) -> Result<SweepReport> {
    plan.validate()?;
    let axis = plan.sweep.as_ref().ok_or_else(|| Error::Config("plan has no sweep axis".into()))?;
    let mut rows = Vec::new();
    for scenario in &plan.scenarios {
        for i in 0..axis.len() {
            let x = axis.value(i);
            let mut point_plan = plan.clone();
            let point = match axis {
                SweepAxis::Lambda(v) => {
                    point_plan.lambdas = vec![v[i]];
                    Ok(scenario.clone())
                }
                SweepAxis::PriorWidth(v) => scenario
                    .prior
                    .scaled_about_mean(v[i])
                    .map(|prior| Scenario { prior, quadrature: None, ..scenario.clone() }),
                SweepAxis::NodeCount(v) => scenario.with_quadrature_points(v[i]).unwrap_or_else(|| {
                    Err(Error::Config(format!("scenario '{}' has no quadrature prior", scenario.name)))
                }),
            };
            match point {
                Ok(s) => {
                    let rep = run_scenario(&point_plan, &s, backend);
                    if let Some(e) = &rep.error {
                        rows.push(SweepRow {
                            scenario: scenario.name.clone(),
                            axis_value: x,
                            bound: "*".into(),
                            lambda: None,
                            value: None,
                            status: e.kind.clone(),
                        });
                    }
                    for b in rep.bounds {
                        rows.push(SweepRow {
                            scenario: scenario.name.clone(),
                            axis_value: x,
                            status: b.error.as_ref().map_or(b.status.clone(), |e| e.kind.clone()),
                            bound: b.name,
                            lambda: b.lambda,
                            value: b.value,
                        });
                    }
                }
                Err(e) => rows.push(SweepRow {
                    scenario: scenario.name.clone(),
                    axis_value: x,
                    bound: "*".into(),
                    lambda: None,
                    value: None,
                    status: e.kind().into(),
                }),
            }
        }
    }
    Ok(SweepReport {
        schema: SWEEP_SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: plan.config_hash.clone(),
        backend: backend.name().into(),
        axis: axis.name().into(),
        rows,
    })
}

/// `serde_json` formatter printing every float with 17 significant digits.
struct SeventeenDigits(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{}", fmt_f64(value))
    }
    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// A finite float in scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with floats at 17 significant digits (non-finite → `null`).
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits(Default::default()));
    value.serialize(&mut ser).map_err(|e| Error::InternalInconsistency(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Flat table of every bound entry: one row per (scenario, bound, λ).
pub fn report_csv(report: &BoundReport) -> String {
    let mut out = format!("# schema={} version={} config_hash={}\n", REPORT_SCHEMA, report.version, report.config_hash);
    out.push_str("scenario,bound,lambda,value,status,solver_status,residual\n");
    for s in &report.scenarios {
        for b in &s.bounds {
            let status = b.error.as_ref().map_or(b.status.as_str(), |e| e.kind.as_str());
            let (solver_status, residual) = match &b.solver {
                Some(info) => (format!("{:?}", info.status).to_lowercase(), fmt_f64(info.residual)),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.name,
                b.name,
                opt(b.lambda),
                opt(b.value),
                status,
                solver_status,
                residual
            );
        }
    }
    out
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = format!("# schema={} version={} config_hash={}\n", SWEEP_SCHEMA, report.version, report.config_hash);
    let _ = writeln!(out, "scenario,axis_{},bound,lambda,value,status", report.axis);
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scenario,
            fmt_f64(r.axis_value),
            r.bound,
            opt(r.lambda),
            opt(r.value),
            r.status
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::scenario;
    use crate::sdp::ClarabelBackend;

    fn plan_for(names: &[&str]) -> RunPlan {
        RunPlan::new(names.iter().map(|n| scenario(n).unwrap()).collect())
    }

    #[test]
    fn direct_only_point_mass() {
        let mut plan = plan_for(&["point_mass"]);
        plan.bounds = vec![BoundKind::Direct];
        let rep = run(&plan, &ClarabelBackend::default()).unwrap();
        let v = rep.scenarios[0].value("direct", None).unwrap();
        assert!(v.abs() < 1e-12);
        assert_eq!(rep.scenarios[0].bounds.len(), 1);
    }

    #[test]
    fn full_plan_on_coin() {
        let rep = run(&plan_for(&["two_node_coin"]), &ClarabelBackend::default()).unwrap();
        let s = &rep.scenarios[0];
        for b in &s.bounds {
            if b.name == "personick_matrix" || b.value.is_some() {
                let v = b.value.unwrap();
                assert!((v - 0.75).abs() < 1e-5, "{} {:?} = {v}", b.name, b.lambda);
            } else {
                panic!("{} failed: {:?}", b.name, b.error);
            }
        }
        assert!(s.ordering_passed());
        assert!(!s.ordering.is_empty());
        assert_eq!(s.oracles.len(), 2);
    }

    #[test]
    fn varying_weight_isolates_errors() {
        let rep = run(&plan_for(&["qubit_xy_varying_weight"]), &ClarabelBackend::default()).unwrap();
        let s = &rep.scenarios[0];
        let bld = s.bound("bld", Some(0.0)).unwrap();
        assert_eq!(bld.error.as_ref().unwrap().kind, "UnsupportedWeight");
        assert!(s.value("direct", None).is_some());
        assert!(s.value("bnh", None).is_some());
        assert!(s.value("bh_thetadep", None).is_some());
        assert!(s.ordering_passed());
    }

    #[test]
    fn deterministic_json() {
        let mut plan = plan_for(&["qubit_xy", "two_node_coin"]);
        plan.bounds = vec![BoundKind::Direct, BoundKind::Bld, BoundKind::BhLambda];
        plan.config_hash = "abc".into();
        let a = to_json(&run(&plan, &ClarabelBackend::default()).unwrap()).unwrap();
        let b = to_json(&run(&plan, &ClarabelBackend::default()).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": \"bayesbound.report/v1\""));
        assert!(a.contains("7.5000000000000000e-1"));
    }

    #[test]
    fn lambda_sweep_is_symmetric() {
        let mut plan = plan_for(&["qubit_xy"]);
        plan.bounds = vec![BoundKind::BhLambda];
        plan.sweep = Some(SweepAxis::Lambda(vec![-1.0, -0.5, 0.0, 0.5, 1.0]));
        let rep = sweep(&plan, &ClarabelBackend::default()).unwrap();
        let v: Vec<f64> = rep.rows.iter().map(|r| r.value.unwrap()).collect();
        assert_eq!(v.len(), 5);
        assert!((v[0] - v[4]).abs() < 1e-6 && (v[1] - v[3]).abs() < 1e-6);
        let csv = sweep_csv(&rep);
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn width_sweep_to_zero() {
        let mut plan = plan_for(&["qubit_xy"]);
        plan.bounds = vec![BoundKind::Direct, BoundKind::Bld, BoundKind::Bnh];
        plan.lambdas = vec![0.0];
        plan.sweep = Some(SweepAxis::PriorWidth(vec![1.0, 0.0]));
        let rep = sweep(&plan, &ClarabelBackend::default()).unwrap();
        for r in rep.rows.iter().filter(|r| r.axis_value == 0.0) {
            assert!(r.value.unwrap().abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn plan_validation() {
        let mut plan = plan_for(&["qubit_xy"]);
        plan.lambdas = vec![1.5];
        assert!(run(&plan, &ClarabelBackend::default()).is_err());
        plan.lambdas = vec![0.0];
        plan.sweep = Some(SweepAxis::NodeCount(vec![3]));
        assert!(plan.validate().is_err());
        assert_eq!("bnh".parse::<BoundKind>().unwrap(), BoundKind::Bnh);
        assert!("nope".parse::<BoundKind>().is_err());
    }

    #[test]
    fn node_count_sweep_needs_quadrature() {
        let mut plan = plan_for(&["two_node_coin"]);
        plan.bounds = vec![BoundKind::Direct];
        plan.sweep = Some(SweepAxis::NodeCount(vec![3, 5]));
        let rep = sweep(&plan, &ClarabelBackend::default()).unwrap();
        assert!(rep.rows.iter().all(|r| r.status == "ConfigError"));
    }
}
