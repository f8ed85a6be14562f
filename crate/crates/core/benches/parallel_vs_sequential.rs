use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use twirlkit::ensembles::{pauli_operator, sample_gue_spectrum, sample_haar_unitary};
use twirlkit::form_factors::{form_factors_at, TimeGrid};
use twirlkit::parallel::{map_indexed, map_indexed_seq, RngSeed};
use twirlkit::probes::otoc4_exact;

fn spectrum_task(seed: RngSeed, d: usize, times: &[f64]) -> impl Fn(usize) -> f64 + Sync + Send + '_ {
    move |i| {
        let s = sample_gue_spectrum(d, &mut seed.stream(i as u64)).expect("valid d");
        times.iter().map(|&t| form_factors_at(&s, t).c4).sum()
    }
}

fn form_factor_rows(c: &mut Criterion) {
    let times = TimeGrid::log(0.1, 1e3, 64).times().unwrap();
    let mut group = c.benchmark_group("form_factor_rows");
    group.sample_size(10);
    for d in [256usize, 1024] {
        let f = spectrum_task(RngSeed(1), d, &times);
        group.bench_with_input(BenchmarkId::new("parallel", d), &d, |b, _| b.iter(|| black_box(map_indexed(32, &f))));
        group.bench_with_input(BenchmarkId::new("sequential", d), &d, |b, _| {
            b.iter(|| black_box(map_indexed_seq(32, &f)))
        });
    }
    group.finish();
}

fn conjugated_otoc(c: &mut Criterion) {
    let seed = RngSeed(2);
    let u = sample_haar_unitary(16, &mut seed.stream(0));
    let (a, b) = (pauli_operator("XIII").unwrap(), pauli_operator("IXII").unwrap());
    let f = |i: usize| {
        let g = sample_haar_unitary(16, &mut seed.stream(1 + i as u64));
        otoc4_exact(&g.adjoint().mul(&u).mul(&g), &a, &b).unwrap()
    };
    let mut group = c.benchmark_group("conjugated_otoc_d16");
    group.bench_function("parallel", |bch| bch.iter(|| black_box(map_indexed(256, f))));
    group.bench_function("sequential", |bch| bch.iter(|| black_box(map_indexed_seq(256, f))));
    group.finish();
}

criterion_group!(benches, form_factor_rows, conjugated_otoc);
criterion_main!(benches);
