//! Single-thread vs full-pool timings of the hot paths. Build with
//! `--no-default-features` to time the plain sequential loops instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use curvedither::blut::Blut;
use curvedither::image::{PlanarImage, Plane};
use curvedither::inject::{inject_frame, InjectionConfig};
use curvedither::metrics::{banding_index, BandingOptions};
use curvedither::pattern::{build_bank, voronoi_assign, BankConfig, SiteSet};
use curvedither::rng::Rng;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    // at least two workers on the second pool, even on one core
    let all = std::thread::available_parallelism().map_or(1, |n| n.get()).max(2);
    [1, all]
        .into_iter()
        .map(|n| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            (format!("{n}t"), pool)
        })
        .collect()
}

fn frame_1080p() -> PlanarImage {
    PlanarImage::new(
        10,
        [
            Plane::from_fn(1920, 1080, |x, y| ((x / 2 + y / 4) % 1024) as u16),
            Plane::from_fn(1920, 1080, |x, _| (x % 1024) as u16),
            Plane::from_fn(1920, 1080, |_, y| (y % 1024) as u16),
        ],
    )
    .unwrap()
}

fn bench_inject(c: &mut Criterion) {
    let bank = build_bank(&BankConfig::default()).unwrap();
    let q = frame_1080p();
    let blut = Blut::linear();
    let cfg = InjectionConfig::default();
    let mut g = c.benchmark_group("inject_frame_1080p");
    g.sample_size(20);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            pool.install(|| b.iter(|| inject_frame(&q, &blut, &bank, &cfg).unwrap()))
        });
    }
    g.finish();
}

fn bench_bank(c: &mut Criterion) {
    let cfg = BankConfig {
        variants: 2,
        ..BankConfig::default()
    };
    let mut g = c.benchmark_group("build_bank_200x200_20_blocks");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            pool.install(|| b.iter(|| build_bank(&cfg).unwrap()))
        });
    }
    g.finish();
}

fn bench_voronoi(c: &mut Criterion) {
    let mut rng = Rng::new(1);
    let sites = SiteSet::random(100, 300, &mut rng).unwrap();
    c.bench_function("voronoi_assign_100x100_300", |b| b.iter(|| voronoi_assign(100, &sites).unwrap()));
}

fn bench_metrics(c: &mut Criterion) {
    let q = frame_1080p();
    let plane = q.plane(curvedither::image::Channel::Y);
    let mut g = c.benchmark_group("banding_index_1080p");
    g.sample_size(20);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(&name), |b| {
            pool.install(|| b.iter(|| banding_index(plane, &BandingOptions::default())))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_inject, bench_bank, bench_voronoi, bench_metrics);
criterion_main!(benches);
