//! Exact CDF wall-clock. The precision choice for a parameter set is cached
//! after the first call, so these measure the steady state; the first call
//! (including the F(1) check) is printed separately.

use std::hint::black_box;
use std::time::{Duration, Instant};

use criterion::{criterion_group, criterion_main, Criterion};
use royroot::{exact_cdf, exact_quantile};
use royroot_bench::{Case, S1, S200, S5, S54};

fn first_call(case: &Case) {
    let start = Instant::now();
    let r = exact_cdf(&case.params, case.theta).expect("reference case evaluates");
    eprintln!(
        "{}: first call {:.3} s, F = {:.10}, {} bits",
        case.name,
        start.elapsed().as_secs_f64(),
        r.value,
        r.diagnostics.precision_bits
    );
}

fn cdf(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_cdf");
    for case in [S1, S5, S54] {
        first_call(&case);
        group.bench_function(case.name, |b| b.iter(|| exact_cdf(black_box(&case.params), black_box(case.theta))));
    }
    group.finish();

    let mut slow = c.benchmark_group("exact_cdf_large");
    slow.sample_size(10).measurement_time(Duration::from_secs(30));
    first_call(&S200);
    slow.bench_function(S200.name, |b| b.iter(|| exact_cdf(black_box(&S200.params), black_box(S200.theta))));
    slow.finish();
}

fn quantile(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_quantile");
    group.sample_size(10);
    group.bench_function("s5_m-0.5_n1000_p0.80", |b| {
        let p = royroot::BetaParams::real(5, -0.5, 1000.0).unwrap();
        b.iter(|| exact_quantile(black_box(&p), 0.80))
    });
    group.bench_function("s54_m-0.5_n22.5_p0.95", |b| b.iter(|| exact_quantile(black_box(&S54.params), 0.95)));
    group.finish();
}

criterion_group!(benches, cdf, quantile);
criterion_main!(benches);
