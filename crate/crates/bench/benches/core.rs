use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cuntz_bench::{deep_complement, unequal_pairs};
use cuntz_core::numerics::{dixmier_limit, sf_integral};
use cuntz_core::suites::kms_suite;
use cuntz_core::{build_u_mu_nu, parse, spectral_flow, MultiIndex, SummationConfig};
use std::hint::black_box;

fn bench_canonical(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical_form");
    for depth in [2usize, 4, 6] {
        let a = deep_complement(3, depth);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &a, |b, a| {
            b.iter(|| black_box(a.canonical_form().unwrap()))
        });
    }
    group.finish();

    let a = parse("S[1,2].S[2]' - S[1,2,1].S[2,1]' - S[1,2,2].S[2,2]' + I - S[1].S[1]' - S[2].S[2]'", 2).unwrap();
    c.bench_function("is_zero", |b| b.iter(|| black_box(a.is_zero().unwrap())));
}

fn bench_spectral_flow(c: &mut Criterion) {
    let u = build_u_mu_nu(3, &MultiIndex::from([1, 2, 3, 1]), &MultiIndex::from([2])).unwrap();
    c.bench_function("spectral_flow/single", |b| b.iter(|| black_box(spectral_flow(&u).unwrap())));

    let pairs = unequal_pairs(2, 4);
    c.bench_function("spectral_flow/sweep_n2", |b| {
        b.iter(|| {
            for (mu, nu) in &pairs {
                black_box(spectral_flow(&build_u_mu_nu(2, mu, nu).unwrap()).unwrap());
            }
        })
    });
}

fn bench_kms(c: &mut Criterion) {
    let mut group = c.benchmark_group("kms_suite");
    group.sample_size(10);
    for n in [2u32, 3] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(kms_suite(n, 2).unwrap()))
        });
    }
    group.finish();
}

fn bench_numerics(c: &mut Criterion) {
    let mut group = c.benchmark_group("numerics");
    group.sample_size(10);
    let schedule = [1.1, 1.05, 1.02, 1.01];
    let cfg = SummationConfig::new(100_000);
    group.bench_function("dixmier_limit", |b| b.iter(|| black_box(dixmier_limit(2, &schedule, &cfg).unwrap())));

    let u = build_u_mu_nu(2, &MultiIndex::from([1, 1]), &MultiIndex::from([2])).unwrap();
    let x = cuntz_core::flow::projection_perturbation(&u).unwrap();
    let cfg = SummationConfig::new(10_000);
    group.bench_function("sf_integral", |b| b.iter(|| black_box(sf_integral(&x, 0.5, &cfg).unwrap())));
    group.finish();
}

criterion_group!(benches, bench_canonical, bench_spectral_flow, bench_kms, bench_numerics);
criterion_main!(benches);
