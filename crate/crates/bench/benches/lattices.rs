use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use norm1lat::cohomology;
use norm1lat::glattice;
use norm1lat::groups::{dihedral_on_cosets, DEFAULT_MAX_GROUP_ORDER};
use norm1lat::intmat::{self, IntMatrix};
use norm1lat::paperdihedral::{self, BuildOptions, CaseId};
use norm1lat::{resolution, Int};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| (0..n).map(|_| Int::from(rng.random_range(-9i64..=9))).collect())
        .collect();
    IntMatrix::from_rows(rows, n)
}

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for n in [8, 16, 32] {
        let a = random_matrix(n, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| intmat::smith_normal_form(black_box(a)))
        });
    }
    group.finish();
}

fn paper_cases(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    let opts = BuildOptions::new();
    for (case, n) in [(CaseId::MainIi, 10), (CaseId::AppendixGalois, 5), (CaseId::AppendixC2, 5), (CaseId::MainI, 8)] {
        group.bench_function(format!("{case}_{n}"), |b| {
            b.iter(|| paperdihedral::build(case, black_box(n), &opts).unwrap())
        });
    }
    group.finish();
}

fn flabby(c: &mut Criterion) {
    let mut group = c.benchmark_group("flabby_resolution");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let g = Arc::new(dihedral_on_cosets(n).unwrap());
        let j = glattice::parse_lattice(&g, "J:<x*y>").unwrap();
        group.bench_with_input(BenchmarkId::new("J_dihedral", n), &j, |b, j| {
            b.iter(|| resolution::flabby_resolution(black_box(j), DEFAULT_MAX_GROUP_ORDER).unwrap())
        });
    }
    group.finish();
}

fn h1(c: &mut Criterion) {
    let g = Arc::new(dihedral_on_cosets(6).unwrap());
    let m = glattice::parse_lattice(&g, "J:<x*y> + I:<y>").unwrap();
    let u = g.whole();
    let mut group = c.benchmark_group("h1_d6");
    group.bench_function("presentation", |b| b.iter(|| cohomology::h1_presentation(&u, black_box(&m))));
    group.bench_function("bar", |b| b.iter(|| cohomology::h1_bar(&u, black_box(&m)).unwrap()));
    group.finish();
}

criterion_group!(benches, snf, paper_cases, flabby, h1);
criterion_main!(benches);
