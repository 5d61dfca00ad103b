use criterion::{black_box, criterion_group, criterion_main, Criterion};

use d2d_hopping::{
    column_period, max_collision_ratio_exact, max_continual_collision, satisfies_condition_g,
    FpPoly, FrameStructure, HoppingPattern, LinkMode, PatternSpec, Prime, SimConfig, Simulation,
};

fn new_44x11() -> PatternSpec {
    let frame = FrameStructure::new(44, 11).unwrap();
    let f = FpPoly::parse(Prime::new(11).unwrap(), "x^2+3x+6").unwrap();
    PatternSpec::new_pattern(frame, 0, f).unwrap()
}

fn patterns() -> Vec<(&'static str, HoppingPattern)> {
    let frame = FrameStructure::new(44, 11).unwrap();
    vec![
        ("new", new_44x11().build().unwrap()),
        ("qc", PatternSpec::qc(frame, 0).build().unwrap()),
        ("random", PatternSpec::random(frame, 1).build().unwrap()),
    ]
}

fn bench_columns(c: &mut Criterion) {
    let mut group = c.benchmark_group("j_column_44x11");
    for (name, p) in patterns() {
        group.bench_function(name, |b| {
            let mut t = 0i64;
            b.iter(|| {
                t += 1;
                black_box(p.j_column(t))
            })
        });
    }
    group.finish();
}

fn bench_metrics(c: &mut Criterion) {
    let p = new_44x11().build().unwrap();
    c.bench_function("column_period_new_44x11", |b| {
        b.iter(|| column_period(black_box(&p), 1000).unwrap())
    });
    c.bench_function("collision_ratio_new_44x11", |b| {
        b.iter(|| max_collision_ratio_exact(black_box(&p)).unwrap())
    });
    c.bench_function("continual_collision_new_44x11", |b| {
        b.iter(|| max_continual_collision(black_box(&p), 1000).unwrap())
    });
}

fn bench_condition_g(c: &mut Criterion) {
    let f = FpPoly::parse(Prime::new(47).unwrap(), "x^2+14x+10").unwrap();
    c.bench_function("condition_g_p47", |b| {
        b.iter(|| satisfies_condition_g(black_box(&f)).unwrap())
    });
}

fn bench_sim(c: &mut Criterion) {
    let mut group = c.benchmark_group("sim_frame_483_ues");
    for mode in [LinkMode::Ideal, LinkMode::Sinr] {
        let mut cfg = SimConfig::with_pattern(new_44x11());
        cfg.mode = mode;
        group.bench_function(format!("{mode:?}").to_lowercase(), |b| {
            b.iter_batched(
                || Simulation::new(cfg.clone()).unwrap(),
                |mut sim| sim.step_frame(0),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_columns,
    bench_metrics,
    bench_condition_g,
    bench_sim
);
criterion_main!(benches);
