use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{SdpProblem, SdpSolution, SolveStatus, SolverBackend, OPTIMAL_RESIDUAL_MAX};
use crate::error::{Error, Result};

/// Environment variable consulted for the backend name.
pub const BACKEND_ENV_VAR: &str = "BAYESBOUND_BACKEND";

/// Interior-point backend on top of Clarabel's PSD triangle cone.
#[derive(Debug, Clone)]
pub struct ClarabelBackend {
    pub max_iter: u32,
}

impl Default for ClarabelBackend {
    fn default() -> Self {
        ClarabelBackend { max_iter: 200 }
    }
}

pub fn backend_by_name(name: &str) -> Result<Box<dyn SolverBackend>> {
    match name.to_ascii_lowercase().as_str() {
        "clarabel" | "default" => Ok(Box::new(ClarabelBackend::default())),
        other => Err(Error::InvalidInput(format!("unknown SDP backend '{other}'"))),
    }
}

fn svec_index(row: usize, col: usize) -> usize {
    col * (col + 1) / 2 + row
}

impl SolverBackend for ClarabelBackend {
    fn name(&self) -> &str {
        "clarabel"
    }

    fn solve(&self, problem: &SdpProblem, tol: f64) -> SdpSolution {
        let n = problem.num_variables();
        let failure = |status| SdpSolution {
            value: f64::NAN,
            x: vec![0.0; n],
            status,
            residual: f64::INFINITY,
            iterations: 0,
        };
        if problem.validate().is_err() {
            return failure(SolveStatus::SolverError);
        }

        let mut rows = Vec::new();
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut b = Vec::new();
        let mut cones = Vec::new();

        if !problem.equalities.is_empty() {
            for (i, e) in problem.equalities.iter().enumerate() {
                for &(v, a) in &e.coeffs {
                    rows.push(b.len() + i);
                    cols.push(v);
                    vals.push(a);
                }
            }
            b.extend(problem.equalities.iter().map(|e| e.rhs));
            cones.push(SupportedConeT::ZeroConeT(problem.equalities.len()));
        }

        for con in &problem.psd {
            let base = b.len();
            let len = con.dim * (con.dim + 1) / 2;
            b.resize(base + len, 0.0);
            let scale = |r: usize, c: usize| if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
            for t in &con.constant {
                b[base + svec_index(t.row, t.col)] += scale(t.row, t.col) * t.value;
            }
            // s = b − A x must equal svec(C + Σ x_v A_v), so A carries −svec(A_v).
            for (v, t) in &con.terms {
                rows.push(base + svec_index(t.row, t.col));
                cols.push(*v);
                vals.push(-scale(t.row, t.col) * t.value);
            }
            cones.push(SupportedConeT::PSDTriangleConeT(con.dim));
        }

        let m = b.len();
        let a = CscMatrix::new_from_triplets(m, n, rows, cols, vals);
        let p = CscMatrix::zeros((n, n));
        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_gap_abs(tol)
            .tol_gap_rel(tol)
            .tol_feas(tol)
            .build()
        {
            Ok(s) => s,
            Err(_) => return failure(SolveStatus::SolverError),
        };
        let mut solver = match DefaultSolver::new(&p, &problem.objective, &a, &b, &cones, settings) {
            Ok(s) => s,
            Err(_) => return failure(SolveStatus::SolverError),
        };
        solver.solve();

        let x = solver.solution.x.clone();
        let mut status = match solver.solution.status {
            SolverStatus::Solved => SolveStatus::Optimal,
            SolverStatus::AlmostSolved => SolveStatus::NearOptimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
            _ => SolveStatus::SolverError,
        };
        let residual = problem.feasibility_residual(&x);
        if status == SolveStatus::Optimal && residual > OPTIMAL_RESIDUAL_MAX {
            status = SolveStatus::NearOptimal;
        }
        SdpSolution {
            value: problem.objective_value(&x),
            x,
            status,
            residual,
            iterations: solver.solution.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sdp::{HermitianLmi, LinearEquality, PsdConstraint, Triplet};

    #[test]
    fn scalar_lmi() {
        // min t  s.t.  [[t, 1], [1, t]] ⪰ 0  →  t = 1.
        let mut p = SdpProblem::new();
        let t = p.add_variable("t");
        p.objective[t] = 1.0;
        p.psd.push(PsdConstraint {
            name: "c".into(),
            dim: 2,
            constant: vec![Triplet { row: 0, col: 1, value: 1.0 }],
            terms: vec![(t, Triplet { row: 0, col: 0, value: 1.0 }), (t, Triplet { row: 1, col: 1, value: 1.0 })],
        });
        let sol = ClarabelBackend::default().solve(&p, 1e-8);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn complex_lmi_through_embedding() {
        // min t  s.t.  [[t, i], [−i, t]] ⪰ 0 as a complex constraint → t = 1.
        let mut p = SdpProblem::new();
        let t = p.add_variable("t");
        p.objective[t] = 1.0;
        let mut lmi = HermitianLmi::new(2);
        lmi.add(Some(t), 0, 0, c(1., 0.));
        lmi.add(Some(t), 1, 1, c(1., 0.));
        lmi.add_pair(None, 0, 1, c(0., 1.));
        p.psd.push(lmi.into_constraint("c").unwrap());
        let sol = ClarabelBackend::default().solve(&p, 1e-8);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn equalities_and_unboundedness() {
        // min x + y  s.t.  x − y = 1,  [[x, 0], [0, y]] ⪰ 0  →  (1, 0).
        let mut p = SdpProblem::new();
        let x = p.add_variable("x");
        let y = p.add_variable("y");
        p.objective = vec![1.0, 1.0];
        p.equalities.push(LinearEquality { coeffs: vec![(x, 1.0), (y, -1.0)], rhs: 1.0 });
        p.psd.push(PsdConstraint {
            name: "diag".into(),
            dim: 2,
            constant: vec![],
            terms: vec![(x, Triplet { row: 0, col: 0, value: 1.0 }), (y, Triplet { row: 1, col: 1, value: 1.0 })],
        });
        let sol = ClarabelBackend::default().solve(&p, 1e-8);
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-7);

        let mut q = SdpProblem::new();
        let z = q.add_variable("z");
        q.objective[z] = -1.0;
        q.psd.push(PsdConstraint {
            name: "z>=0".into(),
            dim: 1,
            constant: vec![],
            terms: vec![(z, Triplet { row: 0, col: 0, value: 1.0 })],
        });
        let sol = ClarabelBackend::default().solve(&q, 1e-8);
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn unknown_backend_name() {
        assert!(backend_by_name("mosek").is_err());
        assert_eq!(backend_by_name("Clarabel").unwrap().name(), "clarabel");
    }
}
