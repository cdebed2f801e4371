//! Library bounds against oracles computed here from the raw model.

use bayesbound::catalog::scenario;
use bayesbound::closed::{bld_bound, bld_max_over_lambda, direct_bound};
use bayesbound::model::compute_averages;
use bayesbound::sdp::{bh_lambda_bound, bh_thetadep_bound, bnh_bound, ClarabelBackend, DEFAULT_SOLVER_TOL};
use bayesbound::{ComplexMatrix, RealMatrix};
use nalgebra::SymmetricEigen;

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn tr(a: &ComplexMatrix) -> nalgebra::Complex<f64> {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// `−Tr[W Re K] + Tr|√W Im K √W| + Σπ θᵀWθ` with the λLD equation solved
/// as a dense linear system `(α I⊗S + β Sᵀ⊗I) vec L = vec D`.
fn bld_oracle(name: &str, lambda: f64) -> f64 {
    let s = scenario(name).unwrap();
    let w = s.weight.constant_matrix().unwrap().clone();
    let n = s.model.n_params();
    let d = s.model.dim();
    let mut sb = ComplexMatrix::zeros(d, d);
    let mut db = vec![ComplexMatrix::zeros(d, d); n];
    let mut wbar = 0.0;
    for node in s.prior.nodes() {
        let st = s.model.state(&node.theta).unwrap().matrix().clone();
        sb += st.scale(node.weight);
        for j in 0..n {
            db[j] += st.scale(node.weight * node.theta[j]);
        }
        let t = nalgebra::DVector::from_column_slice(&node.theta);
        wbar += node.weight * (t.transpose() * &w * &t)[(0, 0)];
    }
    let (alpha, beta) = ((1.0 + lambda) / 2.0, (1.0 - lambda) / 2.0);
    let id = ComplexMatrix::identity(d, d);
    let op = kron(&id, &sb).scale(alpha) + kron(&sb.transpose(), &id).scale(beta);
    let lu = op.lu();
    let l: Vec<ComplexMatrix> = db
        .iter()
        .map(|dj| {
            let v = lu.solve(&nalgebra::DVector::from_column_slice(dj.as_slice())).unwrap();
            ComplexMatrix::from_column_slice(d, d, v.as_slice())
        })
        .collect();
    let k = ComplexMatrix::from_fn(n, n, |j, kk| tr(&(&db[kk] * &l[j])));
    let re = k.map(|z| z.re);
    let im = k.map(|z| z.im);
    let we = SymmetricEigen::new(w.clone());
    let sw = &we.eigenvectors * RealMatrix::from_diagonal(&we.eigenvalues.map(f64::sqrt)) * we.eigenvectors.transpose();
    let m = &sw * im * &sw;
    let tn: f64 = m.singular_values().iter().sum();
    -(&w * re).trace() + tn + wbar
}

#[test]
fn bld_matches_dense_solve() {
    for name in ["qubit_xy", "qubit_rotation", "qutrit_commuting", "two_node_coin"] {
        let s = scenario(name).unwrap();
        let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
        for l in [-1.0, -0.3, 0.0, 0.6, 1.0] {
            let lib = bld_bound(&avg, l).unwrap().value;
            let ora = bld_oracle(name, l);
            assert!((lib - ora).abs() < 1e-10, "{name} λ={l}: {lib} vs {ora}");
        }
    }
}

// Hand computation: S_B = diag(3/4, 1/4), D_j = c σ_j with c = E[θ²]/2 = 2/75
// (5-point Gauss-Legendre is exact for the quadratic moments), w̄ = 8/75.
// λ = 0: K_jj = 4c², Im K = 0, so bld = w̄ − 8c² = 568/5625.
// λ = 1: K_jj = (16/3)c², Im K_xy = −(8/3)c², so bld = w̄ − (16/3)c² = 1736/16875.
#[test]
fn xy_regression_baseline() {
    let s = scenario("qubit_xy").unwrap();
    let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
    let b1 = bld_bound(&avg, 1.0).unwrap().value;
    let b0 = bld_bound(&avg, 0.0).unwrap().value;
    assert!((b1 - 1736.0 / 16875.0).abs() < 1e-12, "{b1:.17e}");
    assert!((b0 - 568.0 / 5625.0).abs() < 1e-12, "{b0:.17e}");
    // The imaginary part matters here: the maximum over λ sits at the endpoints.
    let (best, lstar) = bld_max_over_lambda(&avg, 41).unwrap();
    assert!((best.value - b1).abs() < 1e-12);
    assert_eq!(lstar.abs(), 1.0);
}

#[test]
fn point_mass_bounds_vanish() {
    // All prior mass at one θ: the estimator θ̂ = θ is exact, and every bound
    // must lie in [−tol, 0].
    let s = scenario("point_mass").unwrap();
    let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
    let b = ClarabelBackend::default();
    let vals = [
        direct_bound(&avg).unwrap().value,
        bld_bound(&avg, 0.0).unwrap().value,
        bld_bound(&avg, 1.0).unwrap().value,
        bh_lambda_bound(&avg, 1.0, &b, DEFAULT_SOLVER_TOL).unwrap().value,
        bnh_bound(&avg, &b, DEFAULT_SOLVER_TOL).unwrap().value,
    ];
    for v in vals {
        assert!(v.abs() < 1e-6, "{vals:?}");
    }
}

#[test]
fn thetadep_reduces_to_constant_weight_and_orders() {
    let b = ClarabelBackend::default();
    let s = scenario("qubit_xy").unwrap();
    let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
    let bh1 = bh_lambda_bound(&avg, 1.0, &b, DEFAULT_SOLVER_TOL).unwrap().value;
    let wv = s.weight.as_varying();
    let avg_v = compute_averages(&s.model, &s.prior, &wv).unwrap();
    let td = bh_thetadep_bound(&avg_v, &s.model, &s.prior, &wv, &b, DEFAULT_SOLVER_TOL).unwrap().value;
    assert!((td - bh1).abs() < 1e-5, "{td} vs {bh1}");

    let s = scenario("qubit_xy_varying_weight").unwrap();
    let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
    let td = bh_thetadep_bound(&avg, &s.model, &s.prior, &s.weight, &b, DEFAULT_SOLVER_TOL).unwrap().value;
    let bnh = bnh_bound(&avg, &b, DEFAULT_SOLVER_TOL).unwrap().value;
    let direct = direct_bound(&avg).unwrap().value;
    assert!(bnh >= td - 1e-5 && td >= direct - 1e-5, "bnh {bnh} td {td} direct {direct}");
}

#[test]
fn coin_is_tight_everywhere() {
    let s = scenario("two_node_coin").unwrap();
    let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
    let b = ClarabelBackend::default();
    let r = 0.5f64;
    let expect = 1.0 - r * r;
    for v in [
        direct_bound(&avg).unwrap().value,
        bld_bound(&avg, 0.5).unwrap().value,
        bnh_bound(&avg, &b, DEFAULT_SOLVER_TOL).unwrap().value,
    ] {
        assert!((v - expect).abs() < 1e-6, "{v}");
    }
}
