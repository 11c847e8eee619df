use std::hint::black_box;

use anisoframe::corpus::{self, GammaShape};
use anisoframe::interpolation::{interp_norm, SpaceDesc, SpacePair, SplitFamily};
use anisoframe::rnla::{greedy_approximant, sigma_exact, ErrorSpace};
use anisoframe::spaces::{besov_norm, tl_norm, TlMethod};
use anisoframe::{ShearletSystem2D, SpaceParams, Window1D};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn transform(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform");
    g.sample_size(10);
    for n in [64usize, 256] {
        let sys = ShearletSystem2D::new(n, 3.min(n.trailing_zeros() / 2), Window1D::new(3).unwrap()).unwrap();
        let f = corpus::band_limited(&mut corpus::rng(1), n, n / 3);
        g.bench_with_input(BenchmarkId::new("analyze", n), &n, |b, _| b.iter(|| sys.analyze_dense(black_box(&f)).unwrap()));
        let dense = sys.analyze_dense(&f).unwrap();
        g.bench_with_input(BenchmarkId::new("synthesize", n), &n, |b, _| {
            b.iter(|| sys.synthesize_dense(black_box(&dense)).unwrap())
        });
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("norms");
    let par = SpaceParams::new(0.25, 1.5, 2.0).unwrap();
    for size in [8usize, 24, 64] {
        let s = corpus::random_sequence(&mut corpus::rng(size as u64), size, &GammaShape::default());
        g.bench_with_input(BenchmarkId::new("besov", size), &s, |b, s| b.iter(|| besov_norm(black_box(s), &par)));
        g.bench_with_input(BenchmarkId::new("tl_overlay", size), &s, |b, s| {
            b.iter(|| tl_norm(black_box(s), &par, TlMethod::ExactOverlay).unwrap())
        });
    }
    g.finish();
}

fn approximation(c: &mut Criterion) {
    let mut g = c.benchmark_group("approximation");
    let space = ErrorSpace::Besov(SpaceParams::new(0.0, 1.0, 1.0).unwrap());
    for size in [8usize, 16, 22] {
        let s = corpus::random_sequence(&mut corpus::rng(size as u64), size, &GammaShape::default());
        g.bench_with_input(BenchmarkId::new("sigma_exact", size), &s, |b, s| {
            b.iter(|| sigma_exact(black_box(s), &space, 1.0, 0.5).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("greedy", size), &s, |b, s| {
            b.iter(|| greedy_approximant(black_box(s), &space, 1.0, 0.5).unwrap())
        });
    }
    g.finish();
}

fn interpolation(c: &mut Criterion) {
    let pair = SpacePair::new(
        SpaceDesc::Besov(SpaceParams::new(0.0, 1.0, 1.0).unwrap()),
        SpaceDesc::Besov(SpaceParams::new(0.8, 2.0, 2.0).unwrap()),
    );
    let s = corpus::random_sequence(&mut corpus::rng(5), 16, &GammaShape::default());
    c.bench_function("interp_norm/16", |b| {
        b.iter(|| interp_norm(black_box(&s), 0.4, 2.0, &pair, SplitFamily::Threshold).unwrap())
    });
}

criterion_group!(benches, transform, norms, approximation, interpolation);
criterion_main!(benches);
