use cav_sched::bnb::SearchLimits;
use cav_sched::generator::{generate_instance, GeneratorParams};
use cav_sched::model::{Capacity, Instance, Objective, ProblemKind};
use cav_sched::solver::{solve_batch, solve_batch_sequential, Algorithm};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn corpus(kind: ProblemKind, sizes: Vec<usize>, count: u64) -> Vec<Instance> {
    (0..count)
        .map(|seed| {
            let params = GeneratorParams {
                r_max: 10,
                d_max: Some(20),
                w_max: 5,
                buffers: (kind == ProblemKind::Crossroad).then_some([
                    Capacity::Finite(1),
                    Capacity::Finite(0),
                    Capacity::Unbounded,
                    Capacity::Finite(1),
                ]),
                ..GeneratorParams::new(kind, sizes.clone(), 2, seed)
            };
            generate_instance(&params).unwrap()
        })
        .collect()
}

fn batch(c: &mut Criterion) {
    let cases = [
        (
            "crossroad",
            corpus(ProblemKind::Crossroad, vec![2, 2, 2, 2], 32),
            Objective::Cmax,
        ),
        (
            "two_chains",
            corpus(ProblemKind::TwoChains, vec![30, 30], 64),
            Objective::SumWT,
        ),
    ];
    let mut group = c.benchmark_group("solve_batch");
    group.sample_size(10);
    for (name, instances, objective) in &cases {
        group.bench_with_input(BenchmarkId::new("rayon", name), instances, |b, inst| {
            b.iter(|| solve_batch(inst, *objective, Algorithm::Auto, SearchLimits::default()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", name), instances, |b, inst| {
            b.iter(|| solve_batch_sequential(inst, *objective, Algorithm::Auto, SearchLimits::default()))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
