//! The O(n^2) operators on the global rayon pool against a one-thread pool,
//! which runs the same code path as a build without `parallel`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracsob::operators::{frac_integral, rl_derivative};
use fracsob::spaces::gagliardo_seminorm;
use fracsob::verifier::{run_suite, SuiteConfig};
use fracsob::{Grid, LineFunction, SampledFunction, Side};

fn pools() -> [(&'static str, rayon::ThreadPool); 2] {
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    [("pool", all), ("sequential", one)]
}

fn interval(c: &mut Criterion) {
    let mut group = c.benchmark_group("interval");
    group.sample_size(10);
    for n in [1024, 4096] {
        let u = SampledFunction::from_fn(Grid::new(0.0, 1.0, n).unwrap(), |x| x.powf(1.3) + (3.0 * x).sin()).unwrap();
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(format!("rl_derivative/{name}"), n), &u, |b, u| {
                b.iter(|| pool.install(|| rl_derivative(u, 0.5, Side::Left).unwrap()))
            });
            group.bench_with_input(BenchmarkId::new(format!("frac_integral/{name}"), n), &u, |b, u| {
                b.iter(|| pool.install(|| frac_integral(u, 0.5, Side::Right).unwrap()))
            });
        }
    }
    group.finish();
}

fn line(c: &mut Criterion) {
    let mut group = c.benchmark_group("line");
    group.sample_size(10);
    let u = LineFunction::from_fn(16.0, 2048, |x| (-x * x / 2.0).exp()).unwrap();
    for (name, pool) in pools() {
        group.bench_function(format!("gagliardo/{name}"), |b| {
            b.iter(|| pool.install(|| gagliardo_seminorm(&u, 0.5, 2.0).unwrap()))
        });
    }
    group.finish();
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    let config = SuiteConfig { n: 512 };
    for (name, pool) in pools() {
        group.bench_function(format!("pairing/{name}"), |b| {
            b.iter(|| pool.install(|| run_suite("pairing", &config).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, interval, line, suite);
criterion_main!(benches);
