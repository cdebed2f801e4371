use bayesbound::closed::{bld_bound, bld_max_over_lambda, direct_bound};
use bayesbound::model::compute_averages;
use bayesbound::sdp::{bh_lambda_bound, bh_thetadep_bound, bnh_bound, ClarabelBackend, DEFAULT_SOLVER_TOL};
use bayesbound::catalog::scenario;
use criterion::{criterion_group, criterion_main, Criterion};

fn bounds(c: &mut Criterion) {
    let backend = ClarabelBackend::default();
    for name in ["qubit_rotation", "qubit_xy", "qutrit_commuting"] {
        let s = scenario(name).unwrap();
        let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
        let mut g = c.benchmark_group(name);
        g.sample_size(20);
        g.bench_function("averages", |b| b.iter(|| compute_averages(&s.model, &s.prior, &s.weight).unwrap()));
        g.bench_function("direct", |b| b.iter(|| direct_bound(&avg).unwrap()));
        g.bench_function("bld_1", |b| b.iter(|| bld_bound(&avg, 1.0).unwrap()));
        g.bench_function("bld_max_41", |b| b.iter(|| bld_max_over_lambda(&avg, 41).unwrap()));
        g.bench_function("bh_lambda_1", |b| b.iter(|| bh_lambda_bound(&avg, 1.0, &backend, DEFAULT_SOLVER_TOL).unwrap()));
        g.bench_function("bnh", |b| b.iter(|| bnh_bound(&avg, &backend, DEFAULT_SOLVER_TOL).unwrap()));
        g.finish();
    }
    let s = scenario("qubit_xy_varying_weight").unwrap();
    let avg = compute_averages(&s.model, &s.prior, &s.weight).unwrap();
    c.benchmark_group("qubit_xy_varying_weight").sample_size(10).bench_function("bh_thetadep", |b| {
        b.iter(|| bh_thetadep_bound(&avg, &s.model, &s.prior, &s.weight, &backend, DEFAULT_SOLVER_TOL).unwrap())
    });
}

criterion_group!(benches, bounds);
criterion_main!(benches);
