use congrec::classifier::{loo_evaluate, train_linear_svm, EvaluationConfig};
use congrec::recommender::{build_fill, plan_grid, simulate_ranges, Compositions, SimulationInput};
use congrec::{FeatureSetKind, RecommenderConfig, SvmParams};
use congrec_bench::Fixture;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for (m, units) in [(3, 8), (8, 9), (10, 18)] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("m{m}_u{units}")), &(m, units), |b, &(m, u)| {
            b.iter(|| Compositions::new(m, u).count())
        });
    }
    group.finish();
}

fn ranges(c: &mut Criterion) {
    let fx = Fixture::planted();
    let (selection, grid) = plan_grid(&fx.artifact, &RecommenderConfig::default()).unwrap();
    let user = &fx.cohort[0];
    let fill = build_fill(Some(&user.activity), &selection.fixed, grid.lambda, &fx.artifact.activity_stats.mean);
    let input = SimulationInput {
        personality: user.personality,
        selection: &selection,
        fill: &fill,
        grid,
        correlation: &fx.dataset.correlation,
        median: fx.artifact.median,
    };
    let mut group = c.benchmark_group("simulate_ranges_m8");
    for workers in [1, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| simulate_ranges(black_box(&input), &fx.artifact.model, w).unwrap())
        });
    }
    group.finish();
}

fn svm(c: &mut Criterion) {
    let fx = Fixture::planted();
    let mut group = c.benchmark_group("train_svm");
    for kind in [FeatureSetKind::Congruence, FeatureSetKind::PersonalityActivity] {
        let (x, y) = fx.training_set(kind);
        group.bench_function(kind.cli_name(), |b| {
            b.iter(|| train_linear_svm(black_box(&x), &y, &SvmParams::default()).unwrap())
        });
    }
    group.finish();
}

fn loo(c: &mut Criterion) {
    let fx = Fixture::planted();
    let mut group = c.benchmark_group("loo_congruence");
    group.sample_size(10);
    for workers in [1, 4] {
        let config = EvaluationConfig { workers, ..Default::default() };
        group.bench_with_input(BenchmarkId::from_parameter(workers), &config, |b, cfg| {
            b.iter(|| loo_evaluate(&fx.cohort, FeatureSetKind::Congruence, &fx.dataset.correlation, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, ranges, svm, loo);
criterion_main!(benches);
