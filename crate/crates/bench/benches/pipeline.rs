use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use coxwalls_core::cover::{self, PermutationQuotient};
use coxwalls_core::partitions::{self, GreedyConfig};
use coxwalls_core::probability::{self, LinkModel};
use coxwalls_core::{morse, walls, CoxeterPresentation, TwoComplex};

fn compressed(r: usize) -> TwoComplex {
    let p = CoxeterPresentation::uniform(r, 3).unwrap();
    let q = PermutationQuotient::star_transpositions(r);
    let c = cover::regular_cover(&p, &q, 1_000_000).unwrap();
    cover::compress(&c.complex, &p).unwrap()
}

fn cover_and_compress(c: &mut Criterion) {
    let mut g = c.benchmark_group("compress");
    for r in [4, 5] {
        let p = CoxeterPresentation::uniform(r, 3).unwrap();
        let q = PermutationQuotient::star_transpositions(r);
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, _| {
            b.iter(|| {
                let c = cover::regular_cover(&p, &q, 1_000_000).unwrap();
                cover::compress(&c.complex, &p).unwrap()
            })
        });
    }
    g.finish();
}

fn wall_extraction(c: &mut Criterion) {
    let mut g = c.benchmark_group("walls");
    for r in [4, 5] {
        let k = compressed(r);
        g.bench_with_input(BenchmarkId::from_parameter(r), &k, |b, k| {
            b.iter(|| walls::pathology_report(black_box(k)).unwrap())
        });
    }
    g.finish();
}

fn orientation_check(c: &mut Criterion) {
    let k = compressed(5);
    let ws = walls::extract_walls(&k).unwrap();
    let o = coxwalls_core::WallOrientation::sample(ws.len(), 1, 0);
    c.bench_function("asc_desc_links/5", |b| {
        b.iter(|| morse::asc_desc_links(&k, &ws, black_box(&o)).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let model = LinkModel::new(6, 3).unwrap();
    c.bench_function("monte_carlo/6-3/65536", |b| {
        b.iter(|| probability::monte_carlo_failure(&model, 1 << 16, black_box(1)).unwrap())
    });
}

fn greedy(c: &mut Criterion) {
    let mut g = c.benchmark_group("greedy_family");
    g.sample_size(10);
    for r in [6, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| partitions::greedy_family(r, &GreedyConfig::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, cover_and_compress, wall_extraction, orientation_check, monte_carlo, greedy);
criterion_main!(benches);
