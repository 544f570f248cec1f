use std::hint::black_box;

use barydecomp_core::caratheodory::{decompose_nd, SystemND};
use barydecomp_core::convexity::{f2_star, TabulatedFunction};
use barydecomp_core::exec::{map, Strategy};
use barydecomp_core::pointmass1d::{decompose_pairs, System1D};
use barydecomp_core::rational::{int, rat, Rational};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Strategy); 2] = [("sequential", Strategy::Sequential), ("parallel", Strategy::Parallel)];

fn systems_1d(count: usize) -> Vec<System1D> {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    (0..count)
        .map(|_| {
            let n = r.gen_range(2..=20);
            System1D::new((0..n).map(|_| (rat(r.gen_range(-60..=60), r.gen_range(1..=3)), int(r.gen_range(1..=12)))))
                .unwrap()
        })
        .collect()
}

fn systems_nd(count: usize) -> Vec<SystemND<Rational>> {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    (0..count)
        .map(|_| {
            let (n, k) = (r.gen_range(1..=4), r.gen_range(2..=12));
            let pts = (0..k)
                .map(|_| ((0..n).map(|_| int(r.gen_range(-6..=6))).collect(), int(r.gen_range(1..=9))))
                .collect();
            SystemND::new(n, pts).unwrap()
        })
        .collect()
}

fn tables(count: usize) -> Vec<(TabulatedFunction, Rational)> {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    (0..count)
        .map(|_| {
            let d: Vec<Rational> = (-20..=20).map(|k| rat(k, 4)).collect();
            let v = d.iter().map(|_| int(r.gen_range(-30..=30))).collect();
            (TabulatedFunction::new(d, v).unwrap(), rat(r.gen_range(-19..=19), 4))
        })
        .collect()
}

fn bench(c: &mut Criterion) {
    let one = systems_1d(2_000);
    let many = systems_nd(500);
    let hulls = tables(500);
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    for (name, strategy) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new("decompose_pairs", name), &one, |b, xs| {
            b.iter(|| black_box(map(strategy, xs, decompose_pairs)))
        });
        group.bench_with_input(BenchmarkId::new("decompose_nd", name), &many, |b, xs| {
            b.iter(|| black_box(map(strategy, xs, decompose_nd)))
        });
        group.bench_with_input(BenchmarkId::new("f2_star", name), &hulls, |b, xs| {
            b.iter(|| black_box(map(strategy, xs, |(f, c)| f2_star(f, c).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
