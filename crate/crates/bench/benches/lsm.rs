use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heston_aes::lsm::{build_features, regress_continuation, CrossSection};
use heston_aes::{lsm_price, simulate, BasisSpec, ExerciseSchedule, ModelKind, Preset, PutPayoff, Scheme, TimeGrid};

fn pricing(c: &mut Criterion) {
    let mut g = c.benchmark_group("lsm_price");
    g.sample_size(10);
    for preset in [Preset::FellerViolating, Preset::DoubleHestonZhang] {
        let model = preset.params();
        let grid = TimeGrid::new(0.25, 12).unwrap();
        let paths = simulate(&model, Scheme::Aes, &grid, 20_000, 3).unwrap();
        let payoff = PutPayoff::new(preset.strike()).unwrap();
        let sched = ExerciseSchedule::american(grid);
        g.bench_function(BenchmarkId::from_parameter(preset.name()), |b| {
            b.iter(|| lsm_price(&paths, &payoff, &sched, model.r()).unwrap())
        });
    }
    g.finish();
}

fn regression(c: &mut Criterion) {
    let grid = TimeGrid::new(0.25, 1).unwrap();
    let paths = simulate(&Preset::FellerViolating.params(), Scheme::Aes, &grid, 20_000, 4).unwrap();
    let cs = CrossSection {
        asset: paths.asset(1),
        variance_1: paths.variance_1(1),
        variance_2: None,
    };
    let basis = BasisSpec::new(ModelKind::Heston);
    let x = build_features(&cs, 100.0, &basis);
    let y = x.column(1).map(|s| (1.0 - s).max(0.0));
    c.bench_function("regress_continuation/20000x6", |b| {
        b.iter(|| regress_continuation(&x, &y).unwrap())
    });
}

criterion_group!(benches, pricing, regression);
criterion_main!(benches);
