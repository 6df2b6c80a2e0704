use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use svm_core::exec::Exec;
use svm_core::fv2d::Stepper;
use svm_core::presets::{build_grid, defaults, initial_field};

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("case1_step");
    group.sample_size(10);
    for n in [64usize, 128] {
        let cfg = defaults(1).unwrap().with_resolution(n, n);
        let grid = build_grid(&cfg).unwrap();
        let fs = initial_field(&cfg, &grid).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let stepper = Stepper::new(grid.clone(), cfg.params, cfg.cfl).with_exec(exec);
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &fs, |b, fs| {
                b.iter(|| stepper.advance(fs, None).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, step);
criterion_main!(benches);
