use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use nnpoly_core::bound_search::sample_matrix;
use nnpoly_core::construct::{make_p_a, SurdFamily};
use nnpoly_core::falsify::{search_witness, SearchConfig};
use nnpoly_core::scalar::rational_from_ratio;

fn evaluation(c: &mut Criterion) {
    let a = sample_matrix(4, 1, 0);
    let p = make_p_a(4, &rational_from_ratio(1, 2)).unwrap();
    c.bench_function("exact p_a(A) n=4", |b| b.iter(|| p.eval_matrix(black_box(&a))));

    let surd = SurdFamily::p_a(4, rational_from_ratio(1, 3)).unwrap();
    c.bench_function("surd check n=4", |b| b.iter(|| surd.first_negative_entry(black_box(&a)).unwrap()));

    let over = make_p_a(2, &rational_from_ratio(5, 2)).unwrap();
    let cfg = SearchConfig { starts: 16, ..SearchConfig::default() };
    c.bench_function("witness search n=2", |b| b.iter(|| search_witness(black_box(&over), 2, &cfg).unwrap()));
}

criterion_group!(benches, evaluation);
criterion_main!(benches);
