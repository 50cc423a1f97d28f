use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsw_bench::{chorded_cycle, dense_matrix, weighted_line};
use qsw_core::graph::enlarge;
use qsw_core::linalg::expm;
use qsw_core::operators::corrected_lindblad;
use qsw_core::{OdeOptions, SeedFamily};

fn bench_expm(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm");
    for n in [16, 64, 144] {
        let m = dense_matrix(n, 4.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| expm(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    for n in [21, 51] {
        let (sys, rho) = weighted_line(n, 0.5);
        group.bench_with_input(BenchmarkId::new("dense", n), &rho, |b, rho| {
            b.iter(|| sys.generator().rhs(black_box(rho)).unwrap())
        });
    }
    group.finish();
}

fn bench_ode(c: &mut Criterion) {
    let (sys, rho) = weighted_line(21, 0.5);
    let opts = OdeOptions::with_tol(1e-10);
    c.bench_function("ode/line21_t5", |b| {
        b.iter(|| {
            sys.generator()
                .evolve_ode(black_box(&rho), 5.0, &opts)
                .unwrap()
        })
    });
}

fn bench_corrected(c: &mut Criterion) {
    let mut group = c.benchmark_group("corrected_lindblad");
    for n in [8, 32] {
        let eg = enlarge(&chorded_cycle(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &eg, |b, eg| {
            b.iter(|| corrected_lindblad(black_box(eg), &SeedFamily::Fourier).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_expm, bench_rhs, bench_ode, bench_corrected);
criterion_main!(benches);
