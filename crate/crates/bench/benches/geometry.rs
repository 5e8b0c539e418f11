use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use srbm2d::tail::{self, Measure};
use srbm2d::{adh, domain, points, rate, CharPoints, Domains, Vector2};
use srbm2d_bench::{all, directions};

fn char_points(c: &mut Criterion) {
    let mut g = c.benchmark_group("points");
    for (name, s) in all() {
        g.bench_function(name, |b| b.iter(|| CharPoints::compute(black_box(&s))));
    }
    g.finish();
}

fn classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for (name, s) in all() {
        g.bench_function(name, |b| {
            b.iter(|| {
                let s = black_box(&s);
                (
                    domain::tau(s).unwrap(),
                    domain::category(s).unwrap(),
                    adh::product_form(s).unwrap(),
                    tail::classify_boundary_tail(s, Measure::Nu2).unwrap(),
                )
            })
        });
    }
    g.finish();
}

fn rate_profile(c: &mut Criterion) {
    let dirs = directions(90);
    let mut g = c.benchmark_group("rate_profile_90");
    for (name, s) in all() {
        g.bench_function(name, |b| {
            b.iter(|| dirs.iter().map(|&v| rate::rate(&s, v).unwrap().value).sum::<f64>())
        });
    }
    g.finish();
}

fn domain_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("domain_scan_100x100");
    for (name, s) in all() {
        let dom = Domains::new(&s).unwrap();
        let hi = points::theta_max(&s, 1).x1.max(points::theta_max(&s, 2).x2) + 1.0;
        g.bench_function(name, |b| {
            b.iter(|| {
                let mut n = 0;
                for i in 0..100 {
                    for j in 0..100 {
                        let th = Vector2::new(-hi + 0.02 * hi * i as f64, -hi + 0.02 * hi * j as f64);
                        n += dom.in_d(black_box(th)) as usize;
                    }
                }
                n
            })
        });
    }
    g.finish();
}

criterion_group!(benches, char_points, classify, rate_profile, domain_scan);
criterion_main!(benches);
