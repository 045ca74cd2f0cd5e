//! Sequential vs. data-parallel execution of the sampled sweeps.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ebq_core::exec::Exec;
use ebq_core::suites::{run_suite, RunConfig, Suite};
use ebq_core::{c, AlgebraParams};
use std::hint::black_box;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn sweeps(cr: &mut Criterion) {
    let pr = AlgebraParams::new(2, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)).unwrap();
    let mut g = cr.benchmark_group("suite_N2_8_samples");
    g.sample_size(10);
    for suite in [Suite::Dybe, Suite::RepLR] {
        for (name, exec) in modes() {
            let mut cfg = RunConfig::new(pr.clone(), 7, 8);
            cfg.exec = exec;
            g.bench_with_input(BenchmarkId::new(suite.name(), name), &cfg, |b, cfg| {
                b.iter(|| black_box(run_suite(suite, cfg).unwrap()))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
