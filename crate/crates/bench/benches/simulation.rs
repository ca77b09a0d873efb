use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ladder_bench::{company, scenario};
use ladder_core::company::PromotionPolicy;
use ladder_core::scheduler::{assign_projects, TurnPlan};
use ladder_core::{run_replications, run_simulation, NoopObserver, RngStream, LEVELS};

fn single_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    for preset in ["no-biases", "all-biases", "norms"] {
        let cfg = scenario(preset, 20);
        group.bench_with_input(BenchmarkId::from_parameter(preset), &cfg, |b, cfg| {
            b.iter(|| run_simulation(black_box(cfg), 42, 0).unwrap())
        });
    }
    group.finish();
}

fn turn_pieces(c: &mut Criterion) {
    let cfg = scenario("all-biases", 1);
    let firm = company(&cfg, 7);
    c.bench_function("assign_projects/stretch_turn", |b| {
        let plan = TurnPlan::new(12, cfg.n_stretch, cfg.n_promotion);
        let mut rng = RngStream::new(1, 0);
        b.iter(|| {
            for level in 1..=LEVELS {
                black_box(assign_projects(firm.level(level), &plan, &cfg, &mut rng));
            }
        })
    });
    c.bench_function("promotion_cycle/merit", |b| {
        let mut rng = RngStream::new(1, 0);
        b.iter_batched(
            || firm.clone(),
            |mut f| f.run_promotion_cycle(PromotionPolicy::Merit, &cfg, &mut rng, &mut NoopObserver),
            criterion::BatchSize::SmallInput,
        )
    });
    c.bench_function("promotion_cycle/quota", |b| {
        let mut rng = RngStream::new(1, 0);
        b.iter_batched(
            || firm.clone(),
            |mut f| f.run_promotion_cycle(PromotionPolicy::Quota { k: 70.0 }, &cfg, &mut rng, &mut NoopObserver),
            criterion::BatchSize::SmallInput,
        )
    });
}

fn replications(c: &mut Criterion) {
    let cfg = scenario("all-biases", 20);
    c.bench_function("replications/10_runs", |b| b.iter(|| run_replications(&cfg, 10, 42, 1).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(5));
    targets = single_run, turn_pieces, replications
}
criterion_main!(benches);
