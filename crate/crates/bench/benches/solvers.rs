use std::hint::black_box;

use contagion_core::bailout::optimal_infusion;
use contagion_core::model::endowment_vector;
use contagion_core::{
    build_graphon, cross_holdings, presets, sample_sbm, solve_extremal_cutoffs, Side,
    SolveStrategy, SolvencyVector, ValuationSolver,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn sampling(c: &mut Criterion) {
    let spec = presets::two_block();
    let mut group = c.benchmark_group("sample_sbm");
    for n in [200usize, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sample_sbm(&spec, n, black_box(7)).unwrap())
        });
    }
    group.finish();
}

fn finite_solve(c: &mut Criterion) {
    let spec = presets::two_block();
    let mut group = c.benchmark_group("finite");
    group.sample_size(10);
    for n in [200usize, 1000] {
        let net = sample_sbm(&spec, n, 7).unwrap();
        let holdings = cross_holdings(&net, spec.exposure());
        let e = endowment_vector(&spec, n);
        group.bench_with_input(BenchmarkId::new("lu_factor_and_solve", n), &n, |b, &n| {
            b.iter(|| {
                ValuationSolver::new(&holdings, &e, spec.failure_cost(), SolveStrategy::Direct)
                    .unwrap()
                    .solve(&SolvencyVector::all_solvent(n))
                    .unwrap()
            })
        });
        let solver =
            ValuationSolver::new(&holdings, &e, spec.failure_cost(), SolveStrategy::Direct)
                .unwrap();
        group.bench_with_input(BenchmarkId::new("maximal_equilibrium", n), &n, |b, _| {
            b.iter(|| {
                solver
                    .extremal(black_box(spec.threshold()), Side::Maximal)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn graphon(c: &mut Criterion) {
    let g = build_graphon(&presets::two_block()).unwrap();
    c.bench_function("graphon_cutoffs", |b| {
        b.iter(|| solve_extremal_cutoffs(black_box(&g), Side::Maximal).unwrap())
    });
    c.bench_function("optimal_infusion", |b| {
        b.iter(|| optimal_infusion(black_box(&g), 0.02).unwrap())
    });
}

criterion_group!(benches, sampling, finite_solve, graphon);
criterion_main!(benches);
