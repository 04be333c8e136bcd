use std::hint::black_box;

use cobord_core::divdiff::{self, newton_op};
use cobord_core::fgl::{log_pair, universal_fgl};
use cobord_core::hopf::structure_constants;
use cobord_core::lattice::LambdaLattice;
use cobord_core::products::{associativity_check, theorem1_certificate};
use cobord_core::verify::{self, Suite, VerifyConfig};
use cobord_core::DualElement;
use criterion::{criterion_group, criterion_main, Criterion};

fn hopf(c: &mut Criterion) {
    c.bench_function("structure_constants w=6", |b| b.iter(|| structure_constants(black_box(6)).unwrap()));
}

fn fgl(c: &mut Criterion) {
    let mut g = c.benchmark_group("fgl");
    g.sample_size(20);
    g.bench_function("universal_fgl w=8", |b| b.iter(|| universal_fgl(black_box(8)).unwrap()));
    g.bench_function("log_pair w=8", |b| b.iter(|| log_pair(black_box(8)).unwrap()));
    let l = LambdaLattice::new(6).unwrap();
    let s6 = DualElement::generator(6);
    g.bench_function("membership s_6", |b| b.iter(|| l.membership(black_box(&s6)).unwrap()));
    g.finish();
}

fn operators(c: &mut Criterion) {
    let mut g = c.benchmark_group("divdiff");
    g.sample_size(10);
    let op = newton_op(5).unwrap();
    g.bench_function("newton report w=5", |b| b.iter(|| divdiff::report(black_box(&op)).unwrap()));
    g.bench_function("newton mu1 certificate w=4", |b| {
        let op = newton_op(4).unwrap();
        b.iter(|| theorem1_certificate(&op, &op, 4).unwrap())
    });
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("products");
    g.sample_size(10);
    let ev = divdiff::evaluation_op(5).unwrap();
    let mu = cobord_core::products::mu1(&ev, &ev).unwrap().product;
    g.bench_function("associativity evaluation w=5", |b| b.iter(|| associativity_check(&mu, 5).unwrap()));
    g.bench_function("verify hopf w=5", |b| b.iter(|| verify::run(Suite::Hopf, &VerifyConfig::new(5)).unwrap()));
    g.finish();
}

criterion_group!(benches, hopf, fgl, operators, products);
criterion_main!(benches);
