//! The invariant suite run by `bayesbound check` over the catalog.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{catalog, Scenario};
use crate::closed::{bld_bound, direct_bound, solve_lambda_ld};
use crate::error::Result;
use crate::linalg::{c, eig_hermitian_matrix, max_abs, BlockOperator, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::maps::map_lambda;
use crate::model::{compute_averages, AveragedQuantities};
use crate::oracle::{
    classical_optimal_risk, classical_view_of_commuting_model, measured_risk, personick_achieving_measurement,
    EstimatorTable, Povm,
};
use crate::report::DEFAULT_LAMBDAS;
use crate::sdp::{bh_lambda_bound, bnh_bound, lambda_maximality_check, SolverBackend};

/// Seed of the random measurements and operators drawn by the suite.
pub const CHECK_SEED: u64 = 20_240_917;
pub const RANDOM_PAIRS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    /// Largest violation or deviation seen, for context.
    pub worst: f64,
    pub detail: Vec<String>,
}

struct Acc {
    worst: f64,
    failures: Vec<String>,
}

impl Acc {
    fn new() -> Self {
        Acc { worst: 0.0, failures: Vec::new() }
    }

    /// Records `deviation`; a failure when it exceeds `tol`.
    fn dev(&mut self, deviation: f64, tol: f64, what: impl FnOnce() -> String) {
        self.worst = self.worst.max(deviation);
        if !(deviation <= tol) {
            self.failures.push(format!("{} (deviation {deviation:.3e} > {tol:.0e})", what()));
        }
    }

    fn err(&mut self, what: String) {
        self.worst = f64::INFINITY;
        self.failures.push(what);
    }

    fn finish(self, id: u32, name: &str) -> CheckItem {
        CheckItem { id, name: name.into(), passed: self.failures.is_empty(), worst: self.worst, detail: self.failures }
    }
}

fn averages(s: &Scenario) -> Result<AveragedQuantities> {
    compute_averages(&s.model, &s.prior, &s.weight)
}

fn param_ranges(s: &Scenario) -> Vec<[f64; 2]> {
    (0..s.model.n_params())
        .map(|j| {
            let (lo, hi) = s
                .prior
                .nodes()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), n| (lo.min(n.theta[j]), hi.max(n.theta[j])));
            let pad = 0.25 * (hi - lo).max(0.5);
            [lo - pad, hi + pad]
        })
        .collect()
}

fn ordering(scenarios: &[Scenario], backend: &dyn SolverBackend, tol: f64) -> CheckItem {
    let mut acc = Acc::new();
    for s in scenarios.iter().filter(|s| s.weight.is_constant()) {
        let r = (|| -> Result<()> {
            let avg = averages(s)?;
            let bnh = bnh_bound(&avg, backend, tol)?.value;
            let direct = direct_bound(&avg)?.value;
            for l in DEFAULT_LAMBDAS {
                let bh = bh_lambda_bound(&avg, l, backend, tol)?.value;
                let bld = bld_bound(&avg, l)?.value;
                acc.dev(bh - bnh, 1e-5, || format!("{}: bh_lambda({l}) > bnh", s.name));
                acc.dev(bld - bh, 1e-5, || format!("{}: bld({l}) > bh_lambda({l})", s.name));
                acc.dev(direct - bh, 1e-5, || format!("{}: direct > bh_lambda({l})", s.name));
            }
            Ok(())
        })();
        if let Err(e) = r {
            acc.err(format!("{}: {e}", s.name));
        }
    }
    acc.finish(1, "ordering chain bnh >= bh_lambda >= {bld, direct}")
}

fn maximality(scenarios: &[Scenario], backend: &dyn SolverBackend, tol: f64) -> CheckItem {
    let mut acc = Acc::new();
    for s in scenarios.iter().filter(|s| s.weight.is_constant()) {
        match averages(s).and_then(|avg| lambda_maximality_check(&avg, backend, tol, &DEFAULT_LAMBDAS, None)) {
            Ok(r) => {
                acc.worst = acc.worst.max(r.endpoint_excess.max(r.symmetry_gap));
                acc.failures.extend(r.failures.into_iter().map(|f| format!("{}: {f}", s.name)));
            }
            Err(e) => acc.err(format!("{}: {e}", s.name)),
        }
    }
    acc.finish(2, "λ-maximality at ±1, λ ↔ −λ symmetry, Re/Im split of Z")
}

fn classical_collapse(scenarios: &[Scenario], backend: &dyn SolverBackend, tol: f64) -> CheckItem {
    let mut acc = Acc::new();
    for s in scenarios.iter().filter(|s| s.weight.is_constant()) {
        let Ok(view) = classical_view_of_commuting_model(&s.model, &s.prior) else { continue };
        let r = (|| -> Result<()> {
            let avg = averages(s)?;
            let (classical, _) = classical_optimal_risk(&view, &s.prior, &s.weight)?;
            let mut values = vec![
                ("direct".to_string(), direct_bound(&avg)?.value),
                ("bnh".to_string(), bnh_bound(&avg, backend, tol)?.value),
            ];
            for l in DEFAULT_LAMBDAS {
                values.push((format!("bld({l})"), bld_bound(&avg, l)?.value));
            }
            for (name, v) in values {
                acc.dev((v - classical).abs(), 1e-6, || format!("{}: {name} vs classical optimum", s.name));
            }
            Ok(())
        })();
        if let Err(e) = r {
            acc.err(format!("{}: {e}", s.name));
        }
    }
    acc.finish(3, "classical collapse on commuting scenarios")
}

fn personick(scenarios: &[Scenario]) -> CheckItem {
    let mut acc = Acc::new();
    for s in scenarios.iter().filter(|s| s.model.n_params() == 1 && s.weight.is_constant()) {
        let r = (|| -> Result<()> {
            let avg = averages(s)?;
            let (povm, est) = personick_achieving_measurement(&avg)?;
            let risk = measured_risk(&s.model, &s.prior, &s.weight, &povm, &est)?;
            let bound = bld_bound(&avg, 0.0)?.value;
            acc.dev((risk - bound).abs(), 1e-8, || format!("{}: Personick measurement not tight", s.name));
            Ok(())
        })();
        if let Err(e) = r {
            acc.err(format!("{}: {e}", s.name));
        }
    }
    acc.finish(4, "Personick tightness for one parameter")
}

/// Criteria 5 and 6 share the random pairs.
fn random_measurements(scenarios: &[Scenario], backend: &dyn SolverBackend, tol: f64) -> (CheckItem, CheckItem) {
    let mut agree = Acc::new();
    let mut valid = Acc::new();
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
    for s in scenarios {
        let bnh = match averages(s).and_then(|avg| bnh_bound(&avg, backend, tol)) {
            Ok(b) => b.value,
            Err(e) => {
                valid.err(format!("{}: {e}", s.name));
                continue;
            }
        };
        let ranges = param_ranges(s);
        for k in 0..RANDOM_PAIRS {
            let outcomes = rng.gen_range(1..=2 * s.model.dim() + 1);
            let pair = Povm::random(s.model.dim(), outcomes, &mut rng)
                .and_then(|p| Ok((EstimatorTable::random(outcomes, &ranges, &mut rng)?, p)));
            match pair.and_then(|(est, povm)| measured_risk(&s.model, &s.prior, &s.weight, &povm, &est)) {
                Ok(risk) => valid.dev(bnh - risk, 1e-6, || format!("{}: pair {k} risk {risk} below bnh {bnh}", s.name)),
                Err(e) => agree.err(format!("{}: pair {k}: {e}", s.name)),
            }
        }
    }
    (
        agree.finish(5, "direct and block-operator risk formulas agree (1e-10)"),
        valid.finish(6, "measured risk of random pairs >= bnh"),
    )
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let p = &g * g.adjoint();
    let t = p.trace();
    DensityMatrix::new(p / t).expect("normalized Gram matrix is a state")
}

fn lemma2() -> CheckItem {
    let mut acc = Acc::new();
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED ^ 0x2);
    let rand_c = |rng: &mut ChaCha8Rng, r: usize| {
        ComplexMatrix::from_fn(r, r, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    };
    for l in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        for _ in 0..RANDOM_PAIRS {
            let (n, d) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            let s = random_state(&mut rng, d);
            let mut x = BlockOperator::zeros(n, d);
            for j in 0..n {
                for k in j..n {
                    let h = HermitianMatrix::hermitianize(rand_c(&mut rng, d)).into_matrix();
                    *x.block_mut(j, k) = h.clone();
                    *x.block_mut(k, j) = h;
                }
            }
            let m = map_lambda(&x, &s, l).expect("shapes agree");
            let im = m.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
            acc.dev(im.max(max_abs(&(&m - m.transpose()))), 1e-9, || format!("λ={l}: not real symmetric"));

            let g = rand_c(&mut rng, n * d);
            let p = BlockOperator::from_dense(&(&g * g.adjoint()), n).expect("square");
            let m = map_lambda(&p, &s, l).expect("shapes agree");
            let min = eig_hermitian_matrix(&m).map(|e| e.min_value()).unwrap_or(f64::NEG_INFINITY);
            acc.dev((-min).max(0.0), 1e-9, || format!("λ={l}: PSD input, min eigenvalue {min}"));
        }
    }
    acc.finish(7, "E^(λ) real symmetric and positive")
}

fn ld_residuals(scenarios: &[Scenario], grid: &[f64]) -> CheckItem {
    let mut acc = Acc::new();
    for s in scenarios {
        let r = (|| -> Result<()> {
            let avg = averages(s)?;
            for &l in grid {
                let sol = solve_lambda_ld(&avg, l)?;
                acc.dev(sol.relative_residual(&avg), 1e-9, || format!("{}: λ={l} residual", s.name));
                if l == 0.0 {
                    for lj in &sol.l {
                        let herm = max_abs(&(lj - lj.adjoint()));
                        acc.dev(herm, 1e-10, || format!("{}: L^(0) not Hermitian", s.name));
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            acc.err(format!("{}: {e}", s.name));
        }
    }
    acc.finish(8, "λLD residuals and Hermitian L^(0)")
}

fn quadrature(scenarios: &[Scenario]) -> CheckItem {
    let mut acc = Acc::new();
    for s in scenarios.iter().filter(|s| s.model.n_params() == 1 && s.weight.is_constant()) {
        let (Some(a), Some(b)) = (s.with_quadrature_points(31), s.with_quadrature_points(41)) else { continue };
        let r = (|| -> Result<()> {
            let va = bld_bound(&averages(&a?)?, 0.0)?.value;
            let vb = bld_bound(&averages(&b?)?, 0.0)?.value;
            acc.dev((va - vb).abs(), 1e-6, || format!("{}: 31 vs 41 nodes", s.name));
            Ok(())
        })();
        if let Err(e) = r {
            acc.err(format!("{}: {e}", s.name));
        }
    }
    acc.finish(9, "Gauss-Legendre convergence of bld(0), 31 vs 41 nodes")
}

/// Runs all nine checks on `scenarios` (the catalog when `None`).
pub fn run_checks(scenarios: Option<Vec<Scenario>>, backend: &dyn SolverBackend, tol: f64) -> Vec<CheckItem> {
    let scenarios = scenarios.unwrap_or_else(catalog);
    let grid = crate::closed::lambda_grid(crate::closed::DEFAULT_LAMBDA_GRID);
    let (five, six) = random_measurements(&scenarios, backend, tol);
    vec![
        ordering(&scenarios, backend, tol),
        maximality(&scenarios, backend, tol),
        classical_collapse(&scenarios, backend, tol),
        personick(&scenarios),
        five,
        six,
        lemma2(),
        ld_residuals(&scenarios, &grid),
        quadrature(&scenarios),
    ]
}
