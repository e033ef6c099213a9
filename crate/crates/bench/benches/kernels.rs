//! Benchmarks for the hot kernels: field construction, Gauss-sum table
//! builds, cyclotomic multiplication, hypergeometric evaluation, and one
//! small verification run.

use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use finite_hgf_core::hgf::HgfEvaluator;
use finite_hgf_core::verify::{verify, IdentityId, Mode};
use finite_hgf_core::{CycloNum, FiniteField, HgfSpec, SumTables};

fn field_construction(c: &mut Criterion) {
    c.bench_function("field_build_gf256", |b| {
        b.iter(|| FiniteField::from_order(black_box(256)).unwrap())
    });
}

fn gauss_tables(c: &mut Criterion) {
    let field = Arc::new(FiniteField::from_order(64).unwrap());
    c.bench_function("gauss_tables_gf64", |b| {
        b.iter(|| {
            let t = SumTables::new(black_box(field.clone()));
            black_box(t.gauss(t.chi(1)).clone())
        })
    });
}

fn cyclo_mul(c: &mut Criterion) {
    let dense = |step: i64| {
        let mut v = CycloNum::zero();
        for k in 0..16i64 {
            v = &v + &CycloNum::root_of_unity(120, k * step).scale_int(k + 3);
        }
        v
    };
    let a = dense(7);
    let b2 = dense(11);
    c.bench_function("cyclo_mul_m120", |b| b.iter(|| black_box(&a) * black_box(&b2)));
}

fn hgf_eval(c: &mut Criterion) {
    let field = Arc::new(FiniteField::from_order(25).unwrap());
    let tables = SumTables::new(field.clone());
    let spec = HgfSpec::rfs(24, &[1, 5], &[7]);
    let ev = HgfEvaluator::new(&tables, &spec);
    let points: Vec<_> = (0..25).map(|code| field.elem(code).unwrap()).collect();
    c.bench_function("hgf_2f1_gf25_all_points", |b| {
        b.iter(|| {
            for &x in &points {
                black_box(ev.eval(x));
            }
        })
    });
}

fn verify_small(c: &mut Criterion) {
    let field = Arc::new(FiniteField::from_order(7).unwrap());
    let tables = SumTables::new(field);
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("euler_gauss_closed_form_gf7", |b| {
        b.iter(|| {
            let r = verify(&tables, IdentityId::ClosedG11, Mode::Exhaustive);
            assert!(r.passed());
            black_box(r)
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    field_construction,
    gauss_tables,
    cyclo_mul,
    hgf_eval,
    verify_small
);
criterion_main!(benches);
