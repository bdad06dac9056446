use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bidual::bea::{all_halfspaces, all_halfspaces_brute, bea_from_homs, family_bea, separate};
use bidual::dual::bidual_and_evaluate;
use bidual::hom::{enumerate_homs, enumerate_homs_brute};
use bidual::instances::{catalog, generators};
use bidual::{Caps, Template};

fn homs(c: &mut Criterion) {
    let caps = Caps::default();
    let d = catalog::order();
    let mut g = c.benchmark_group("hom_enumeration");
    for n in [6, 10, 14] {
        let mut rng = generators::rng(n as u64);
        let x = generators::random_poset(n, &mut rng);
        g.bench_with_input(BenchmarkId::new("backtracking", n), &x, |b, x| {
            b.iter(|| enumerate_homs(black_box(x), &d, &caps).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("brute", n), &x, |b, x| {
            b.iter(|| enumerate_homs_brute(black_box(x), &d, &caps).unwrap())
        });
    }
    g.finish();
}

fn halfspaces(c: &mut Criterion) {
    let caps = Caps::default();
    let mut g = c.benchmark_group("halfspaces");
    // The oracle's points are the family's members.
    for members in [4, 8, 12] {
        let mut rng = generators::rng(members as u64);
        let family = generators::random_family(6, members, &mut rng);
        let o = family_bea(&family).unwrap();
        g.bench_with_input(BenchmarkId::new("search", members), &o, |b, o| {
            b.iter(|| all_halfspaces(black_box(o), &caps).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("brute", members), &o, |b, o| {
            b.iter(|| all_halfspaces_brute(black_box(o), &caps).unwrap())
        });
    }
    g.finish();
}

fn separation(c: &mut Criterion) {
    let o = bea_from_homs(&generators::chain_poset(12), &catalog::order(), &Caps::default()).unwrap();
    let (a, b) = (1 << (o.n - 1), 1);
    c.bench_function("separate_chain", |bench| bench.iter(|| separate(black_box(&o), a, b).unwrap()));
}

fn bidual(c: &mut Criterion) {
    let caps = Caps::default();
    let d = catalog::order();
    let e = Template::Relational(catalog::bounded_lattice());
    let x = generators::chain_poset(5);
    c.bench_function("bidual_chain5", |b| {
        b.iter(|| bidual_and_evaluate(black_box(&x), &d, &e, &caps).unwrap())
    });
}

criterion_group!(benches, homs, halfspaces, separation, bidual);
criterion_main!(benches);
