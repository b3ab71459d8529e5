//! Building blocks: special functions, assembly, Pfaffian, approximation and
//! Monte Carlo sampling.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use royroot::linalg::pfaffian;
use royroot::mc_oracle::{sample_theta1, McConfig};
use royroot::roy_exact::{build_pfaffian_matrix, log_cdf_at_precision};
use royroot::special_fn::{inc_beta_lower, reg_inc_gamma_p_inv};
use royroot::tw_approx::approx_quantile_beta;
use royroot::{BetaParams, FieldKind, ManovaDims};

fn special(c: &mut Criterion) {
    c.bench_function("inc_beta_lower", |b| b.iter(|| inc_beta_lower(black_box(0.7), 2.5, 101.0)));
    c.bench_function("reg_inc_gamma_p_inv", |b| b.iter(|| reg_inc_gamma_p_inv(black_box(46.446), 0.99)));
}

fn matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly_and_pfaffian_f64");
    for s in [5usize, 10, 14] {
        let p = BetaParams::real(s, -0.5, 100.0).unwrap();
        let a = build_pfaffian_matrix(&p, 0.2).unwrap();
        group.bench_with_input(BenchmarkId::new("assemble", s), &p, |b, p| b.iter(|| build_pfaffian_matrix(p, 0.2)));
        group.bench_with_input(BenchmarkId::new("pfaffian", s), &a, |b, a| b.iter(|| pfaffian(a.order, &a.entries)));
    }
    group.finish();

    let mut group = c.benchmark_group("log_cdf_multiprecision");
    group.sample_size(10);
    for (s, bits) in [(54usize, 288u32), (100, 480)] {
        let p = BetaParams::real(s, -0.5, 22.5).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("s{s}"), bits), &bits, |b, &bits| {
            b.iter(|| log_cdf_at_precision(&p, 0.9, Some(bits)))
        });
    }
    group.finish();
}

fn approx(c: &mut Criterion) {
    let p = BetaParams::real(200, -0.5, 149.5).unwrap();
    c.bench_function("approx_quantile_s200", |b| b.iter(|| approx_quantile_beta(black_box(&p), 0.99)));
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_theta1");
    for field in [FieldKind::Real, FieldKind::Complex] {
        let cfg = McConfig::new(ManovaDims::new(5, 206, 5).unwrap(), field, 1, 0).unwrap();
        let mut r = 0u64;
        group.bench_function(format!("{field:?}_p5"), |b| {
            b.iter(|| {
                r += 1;
                sample_theta1(&cfg, r)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, special, matrix, approx, monte_carlo);
criterion_main!(benches);
