//! One rayon thread against all of them on the same workloads. Build with
//! `--no-default-features` to time the plain sequential code path instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use concavex::recovery::{one_point, two_point};
use concavex::{BundleSpec, DescendentReading, MirrorPipeline};

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let max = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut sizes = vec![1];
    if max > 1 {
        sizes.push(max);
    }
    sizes
        .into_iter()
        .map(|t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            (format!("{t}-thread"), pool)
        })
        .collect()
}

fn bench_pipeline(c: &mut Criterion) {
    let b = BundleSpec::new(5, vec![3], vec![3]).unwrap();
    let mode = if concavex::par::is_parallel() { "rayon" } else { "sequential" };
    let mut g = c.benchmark_group(format!("local-P5/{mode}"));
    g.sample_size(10);
    for (label, pool) in pools() {
        for dmax in [4usize, 7] {
            g.bench_with_input(BenchmarkId::new(format!("one-point {label}"), dmax), &dmax, |bch, &d| {
                bch.iter(|| {
                    pool.install(|| {
                        let p = MirrorPipeline::new(&b, d).unwrap();
                        black_box(one_point(&p, 3, d).unwrap())
                    })
                })
            });
        }
        g.bench_function(format!("two-point D=6 {label}"), |bch| {
            bch.iter(|| {
                pool.install(|| {
                    let p = MirrorPipeline::new(&b, 6).unwrap();
                    black_box(two_point(&p, 2, 0, 2, 6, DescendentReading::Published).unwrap())
                })
            })
        });
    }
    g.finish();
}

fn bench_series(c: &mut Criterion) {
    let b = BundleSpec::new(5, vec![3], vec![3]).unwrap();
    let s = b.hg_base(10, true).unwrap();
    let mut g = c.benchmark_group("series-mul");
    g.sample_size(10);
    for (label, pool) in pools() {
        g.bench_function(format!("hg*hg D=10 {label}"), |bch| {
            bch.iter(|| pool.install(|| black_box(s.mul(&s.drop_q0()).unwrap())))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_pipeline, bench_series);
criterion_main!(benches);
