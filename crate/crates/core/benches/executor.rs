use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use baric_core::exactlinalg::Field;
use baric_core::exec::Executor;
use baric_core::verify::{fuzz, run_suite, Bounds, SuiteOptions};

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_suite");
    g.sample_size(10);
    for name in ["three_strata", "graded_point"] {
        let inst = fuzz::instance(name, Field::Rational).unwrap();
        let sample = fuzz::sample(&inst, 0, 32, &Bounds::default());
        for (label, exec) in [("sequential", Executor::Sequential), ("parallel", Executor::Parallel)] {
            let opts = SuiteOptions { exec, heart_sequences: 32, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(label, name), &sample, |b, s| b.iter(|| run_suite(&inst, s, &opts)));
        }
    }
    g.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
