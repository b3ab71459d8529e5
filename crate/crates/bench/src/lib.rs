//! Reference workloads shared by the benchmarks.

use royroot::BetaParams;

/// A named exact-CDF evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub name: &'static str,
    pub params: BetaParams,
    pub theta: f64,
}

const fn real(s: usize, m: f64, n: f64) -> BetaParams {
    BetaParams {
        s,
        m,
        n,
        field: royroot::FieldKind::Real,
    }
}

/// Uniform law: closed form, sub-millisecond.
pub const S1: Case = Case {
    name: "s1_uniform",
    params: real(1, 0.0, 0.0),
    theta: 0.5,
};

/// Small case where double precision suffices.
pub const S5: Case = Case {
    name: "s5_m-0.5_n100",
    params: real(5, -0.5, 100.0),
    theta: 0.12,
};

/// The classic hard case, at its 95th percentile.
pub const S54: Case = Case {
    name: "s54_m-0.5_n22.5",
    params: real(54, -0.5, 22.5),
    theta: 0.9194087361,
};

/// The largest case, at its 99th percentile.
pub const S200: Case = Case {
    name: "s200_m-0.5_n149.5",
    params: real(200, -0.5, 149.5),
    theta: 0.827760,
};
