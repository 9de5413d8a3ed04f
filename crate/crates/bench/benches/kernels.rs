use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rhofront::fixtures::{exponential_loss, hull_gap_profile, normal_sample, pinned_binomial};
use rhofront::risk_measures::adjusted_es;
use rhofront::{
    detect_arbitrage, dual_evaluate, g_hat_transform, lses, optimal_boundary, FiniteSpace, LossFunction, Market,
    RandVar, RiskSpec,
};

fn market() -> Market {
    let s = FiniteSpace::new(vec![0.2, 0.3, 0.3, 0.2]).unwrap();
    Market::from_excess(&s, 0.0, vec![vec![0.5, -0.3, 0.1, 0.2], vec![-0.2, 0.4, 0.3, -0.4]]).unwrap()
}

fn evaluation(c: &mut Criterion) {
    let x = normal_sample(100_000).unwrap();
    c.bench_function("lses sweep, 1e5 atoms", |b| b.iter(|| lses::evaluate(black_box(&x), 0.2)));
    let y = exponential_loss(200_000, 0.7).unwrap();
    let g = hull_gap_profile();
    c.bench_function("adjusted es, 2e5 atoms", |b| b.iter(|| adjusted_es(black_box(&y), &g)));
    let small =
        RandVar::new(&FiniteSpace::uniform(30).unwrap(), (0..30).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
    let oce = RiskSpec::oce(LossFunction::Exp).unwrap();
    c.bench_function("oce exp dual, 30 atoms", |b| b.iter(|| dual_evaluate(&oce, black_box(&small)).unwrap()));
}

fn frontier(c: &mut Criterion) {
    let m = market();
    let es = RiskSpec::es(0.5).unwrap();
    let lses = RiskSpec::lses(0.5).unwrap();
    c.bench_function("es boundary, 21 points", |b| b.iter(|| optimal_boundary(&es, black_box(&m), 2.0, 21).unwrap()));
    c.bench_function("lses boundary, 21 points", |b| {
        b.iter(|| optimal_boundary(&lses, black_box(&m), 2.0, 21).unwrap())
    });
    let pinned = RiskSpec::AdjEs { g: rhofront::fixtures::pinned_profile() };
    let bin = pinned_binomial();
    c.bench_function("arbitrage detection, pinned", |b| b.iter(|| detect_arbitrage(&pinned, black_box(&bin)).unwrap()));
    let g = hull_gap_profile();
    c.bench_function("hull transform, 1e4 grid", |b| b.iter(|| g_hat_transform(black_box(&g), 10_000).unwrap()));
}

criterion_group!(benches, evaluation, frontier);
criterion_main!(benches);
