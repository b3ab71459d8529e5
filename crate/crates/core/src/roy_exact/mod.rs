//! Exact CDF and quantiles of the largest eigenvalue Θ₁ of a real or
//! complex multivariate beta matrix in the null case.
//!
//! Real: `F(θ) = C(s, m, n) · Pf(A(θ))`. Complex: `F(θ) = C'(s, m, n) · |A(θ)|`.
//! Both are combined in log space. The double-precision path is checked by
//! evaluating the unclamped `F(1)`, which must equal one; when it does not,
//! the same code runs in MPFR at the lowest precision that passes, and each
//! value is cross-checked against a higher precision.

mod assembly;

pub use assembly::{build_pfaffian_matrix, script_e, SkewPfaffianMatrix};

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::{Arith, Mp};
use crate::error::{Error, Result};
use crate::linalg::{self, SignedLog};
use crate::params::{BetaParams, FieldKind};
use crate::special_fn;

/// Residual bound on the unclamped `F(1)` for the double-precision path.
pub const FAST_PATH_TOL: f64 = 1e-8;
/// Residual bound required after escalating precision.
pub const ESCALATED_TOL: f64 = 1e-10;
/// Absolute agreement required between two multi-precision evaluations.
pub const AGREEMENT_TOL: f64 = 1e-10;
/// Give up beyond this many bits.
pub const MAX_BITS: u32 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// |F(1) - 1| of the unclamped formula at the precision used.
    pub normalization_residual: f64,
    /// Precision rounds for a CDF, root-finder steps for a quantile.
    pub iterations: usize,
    pub elapsed_seconds: f64,
    /// 53 for the double-precision path.
    pub precision_bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionResult {
    pub value: f64,
    pub log_value: f64,
    pub diagnostics: Diagnostics,
}

/// ln C(s, m, n) (real) or ln C'(s, m, n) (complex), from log-gamma sums.
pub fn log_norm_constant(p: &BetaParams) -> Result<f64> {
    p.validate()?;
    Ok(log_norm_constant_in::<f64>(p, ()))
}

fn log_norm_constant_in<T: Arith>(p: &BetaParams, ctx: T::Ctx) -> T {
    let c = |v: f64| T::from_f64(v, ctx);
    let lg = |v: T| v.ln_gamma();
    let (s, m, n) = (p.s as f64, c(p.m), c(p.n));
    let mut acc = c(0.0);
    match p.field {
        FieldKind::Real => {
            // (s/2) ln π, with ln π = 2 ln Γ(1/2)
            acc = acc + c(s) * lg(c(0.5));
            let two = c(2.0);
            for i in 1..=p.s {
                let i = i as f64;
                let num = (c(i + s + 2.0) + two.clone() * m.clone() + two.clone() * n.clone()) / two.clone();
                acc = acc + lg(num)
                    - lg(c(i / 2.0))
                    - lg((c(i + 1.0) + two.clone() * m.clone()) / two.clone())
                    - lg((c(i + 1.0) + two.clone() * n.clone()) / two.clone());
            }
        }
        FieldKind::Complex => {
            for i in 1..=p.s {
                let i = i as f64;
                acc = acc + lg(m.clone() + n.clone() + c(s + i))
                    - lg(c(i))
                    - lg(m.clone() + c(i))
                    - lg(n.clone() + c(i));
            }
        }
    }
    acc
}

/// ln F(θ) without clamping, in arithmetic `T`.
fn log_cdf_in<T: Arith>(p: &BetaParams, theta: f64, ctx: T::Ctx) -> Result<T> {
    let ln_c = log_norm_constant_in::<T>(p, ctx);
    let (sign, ln_body) = match p.field {
        FieldKind::Real => {
            let mut a = assembly::assemble_real::<T>(p, theta, ctx)?;
            let (sign, ln_pf) = linalg::pfaffian_in_place(a.order, &mut a.entries, ctx);
            (sign, ln_pf + a.scale_log)
        }
        FieldKind::Complex => {
            let (mut a, scale_log) = assembly::assemble_complex::<T>(p, theta, ctx)?;
            let (sign, ln_det) = linalg::determinant_in_place(p.s, &mut a, ctx);
            (sign, ln_det + scale_log)
        }
    };
    match sign {
        0 => Ok(T::from_f64(f64::NEG_INFINITY, ctx)),
        s if s < 0 => Err(Error::NegativeDeterminant {
            log_abs: ln_body.to_f64(),
        }),
        _ => Ok(ln_c + ln_body),
    }
}

/// log Pf of a (possibly scaled) skew-symmetric matrix, including its
/// recorded scale. A negative Pfaffian is reported as an error.
pub fn log_pfaffian(a: &SkewPfaffianMatrix<f64>) -> Result<SignedLog> {
    let pf = linalg::pfaffian(a.order, &a.entries);
    match pf.sign {
        0 => Ok(SignedLog::ZERO),
        s if s < 0 => Err(Error::NegativeDeterminant { log_abs: pf.log_abs }),
        _ => Ok(SignedLog {
            sign: 1,
            log_abs: pf.log_abs + a.scale_log,
        }),
    }
}

/// Unclamped ln F(θ) at a fixed precision: `None` selects double precision.
pub fn log_cdf_at_precision(p: &BetaParams, theta: f64, bits: Option<u32>) -> Result<f64> {
    p.validate()?;
    match bits {
        None => log_cdf_in::<f64>(p, theta, ()),
        Some(b) => log_cdf_in::<Mp>(p, theta, b).map(|v| v.to_f64()),
    }
}

fn closed_form_s1(p: &BetaParams, theta: f64) -> Result<f64> {
    special_fn::reg_inc_beta(theta, p.m + 1.0, p.n + 1.0)
}

fn residual(ln_f1: f64) -> f64 {
    (ln_f1.exp() - 1.0).abs()
}

/// Starting precision for the multi-precision path. The Pfaffian of the
/// moment-type matrix loses a roughly fixed number of bits per eigenvalue.
fn initial_bits(p: &BetaParams) -> u32 {
    (64 + 4 * p.s as u32).next_multiple_of(32)
}

fn grow(bits: u32) -> u32 {
    (bits + bits / 2).next_multiple_of(32)
}

/// Precision used to cross-check a multi-precision value.
fn partner(bits: u32) -> u32 {
    (bits + bits / 4).next_multiple_of(32)
}

/// Working precision for one parameter set: `None` is double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Plan {
    bits: Option<u32>,
    residual: f64,
    rounds: usize,
}

type PlanKey = (usize, u64, u64, FieldKind);

fn plan_cache() -> &'static Mutex<HashMap<PlanKey, Plan>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Plan>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Lowest precision at which the unclamped `F(1)` is within tolerance.
/// Cached per parameter set, so repeated calls pay for it once.
fn plan(p: &BetaParams) -> Result<Plan> {
    let key = (p.s, p.m.to_bits(), p.n.to_bits(), p.field);
    if let Some(plan) = plan_cache().lock().expect("plan cache poisoned").get(&key) {
        return Ok(*plan);
    }
    let plan = compute_plan(p)?;
    plan_cache().lock().expect("plan cache poisoned").insert(key, plan);
    Ok(plan)
}

fn compute_plan(p: &BetaParams) -> Result<Plan> {
    if p.s == 1 {
        return Ok(Plan { bits: None, residual: 0.0, rounds: 0 });
    }
    if let Ok(Some(ln1)) = ln_total(p, None) {
        let r = residual(ln1);
        if r <= FAST_PATH_TOL {
            return Ok(Plan { bits: None, residual: r, rounds: 1 });
        }
    }
    let mut bits = initial_bits(p);
    let mut rounds = 1;
    let mut last = f64::INFINITY;
    while bits <= MAX_BITS {
        rounds += 1;
        if let Some(ln1) = ln_total(p, Some(bits))? {
            last = residual(ln1);
            if last <= ESCALATED_TOL {
                return Ok(Plan { bits: Some(bits), residual: last, rounds });
            }
        }
        bits = grow(bits);
    }
    Err(Error::PrecisionEscalation { residual: last, bits })
}

/// Unclamped ln F(θ) at a fixed precision; `None` if F came out negative.
fn raw_ln_value_at(p: &BetaParams, theta: f64, bits: Option<u32>) -> Result<Option<f64>> {
    let ln_f = match bits {
        None => log_cdf_in::<f64>(p, theta, ()),
        Some(b) => log_cdf_in::<Mp>(p, theta, b).map(|v| v.to_f64()),
    };
    match ln_f {
        Ok(v) if v.is_nan() => Ok(None),
        Ok(v) => Ok(Some(v)),
        Err(Error::NegativeDeterminant { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn total_cache() -> &'static Mutex<HashMap<(PlanKey, u32), Option<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(PlanKey, u32), Option<f64>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Unclamped ln F(1) at a fixed precision, cached.
fn ln_total(p: &BetaParams, bits: Option<u32>) -> Result<Option<f64>> {
    let key = ((p.s, p.m.to_bits(), p.n.to_bits(), p.field), bits.unwrap_or(53));
    if let Some(v) = total_cache().lock().expect("total cache poisoned").get(&key) {
        return Ok(*v);
    }
    let v = raw_ln_value_at(p, 1.0, bits)?;
    total_cache().lock().expect("total cache poisoned").insert(key, v);
    Ok(v)
}

/// ln F(θ) - ln F(1), both at the same precision. Rounding error in the
/// normalizing constant is common to every θ and cancels, which keeps the
/// upper tail monotone and reaching exactly 1.
fn ln_value_at(p: &BetaParams, theta: f64, bits: Option<u32>) -> Result<Option<f64>> {
    let Some(ln_f) = raw_ln_value_at(p, theta, bits)? else {
        return Ok(None);
    };
    Ok(ln_total(p, bits)?.map(|total| ln_f - total))
}

/// ln F(θ) from `bits` upward until two precisions agree within
/// [`AGREEMENT_TOL`] on the probability scale. Returns the log value, the
/// lower of the agreeing precisions and the number of evaluations.
fn agreed_value(p: &BetaParams, theta: f64, mut bits: u32) -> Result<(f64, u32, usize)> {
    let mut low = ln_value_at(p, theta, Some(bits))?;
    let mut evals = 1;
    while bits <= MAX_BITS {
        let hi_bits = partner(bits);
        let high = ln_value_at(p, theta, Some(hi_bits))?;
        evals += 1;
        if let (Some(lo), Some(hi)) = (low, high) {
            if (hi.exp() - lo.exp()).abs() <= AGREEMENT_TOL {
                return Ok((hi, bits, evals));
            }
        }
        bits = hi_bits;
        low = high;
    }
    Err(Error::PrecisionEscalation {
        residual: f64::NAN,
        bits,
    })
}

/// The self-check behind every exact evaluation: the residual |F(1) - 1| of
/// the unclamped formula at the working precision selected for `p`
/// (53 bits means double precision).
pub fn normalization_check(p: &BetaParams) -> Result<Diagnostics> {
    let start = Instant::now();
    p.validate()?;
    let plan = plan(p)?;
    Ok(Diagnostics {
        normalization_residual: plan.residual,
        iterations: plan.rounds,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        precision_bits: plan.bits.unwrap_or(53),
    })
}

/// Exact CDF of Θ₁ at `theta`, clamped to [0, 1].
pub fn exact_cdf(p: &BetaParams, theta: f64) -> Result<DistributionResult> {
    let start = Instant::now();
    p.validate()?;
    if theta.is_nan() {
        return Err(Error::domain("exact_cdf", "theta is NaN"));
    }
    let done = |ln_f: f64, residual: f64, iterations: usize, bits: u32| DistributionResult {
        value: ln_f.exp().clamp(0.0, 1.0),
        log_value: ln_f.min(0.0),
        diagnostics: Diagnostics {
            normalization_residual: residual,
            iterations,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            precision_bits: bits,
        },
    };
    if theta <= 0.0 {
        return Ok(done(f64::NEG_INFINITY, 0.0, 0, 53));
    }
    if theta >= 1.0 {
        return Ok(done(0.0, 0.0, 0, 53));
    }
    if p.s == 1 {
        let ln_f = special_fn::ln_inc_beta_lower(theta, p.m + 1.0, p.n + 1.0)? - special_fn::ln_beta(p.m + 1.0, p.n + 1.0)?;
        let value = closed_form_s1(p, theta)?;
        return Ok(DistributionResult { value, ..done(ln_f, 0.0, 0, 53) });
    }

    let plan = plan(p)?;
    if plan.bits.is_none() {
        if let Some(ln_f) = ln_value_at(p, theta, None)? {
            if ln_f.is_finite() && ln_f <= FAST_PATH_TOL {
                return Ok(done(ln_f, plan.residual, plan.rounds, 53));
            }
        }
    }
    let bits = plan.bits.unwrap_or_else(|| initial_bits(p));
    let (ln_f, used, evals) = agreed_value(p, theta, bits)?;
    Ok(done(ln_f, plan.residual, plan.rounds + evals, used))
}

/// θ with `exact_cdf(p, θ) = prob`, by bracketed root finding.
///
/// Root finding runs at the precision chosen for `p`; the root is then
/// re-checked at a higher precision and the search repeated if the two
/// disagree.
pub fn exact_quantile(p: &BetaParams, prob: f64) -> Result<DistributionResult> {
    let start = Instant::now();
    p.validate()?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::domain("exact_quantile", format!("prob = {prob} must lie in (0, 1)")));
    }
    let plan = plan(p)?;
    let mut bits = plan.bits;
    let mut total_iter = 0;
    loop {
        let mut f = |theta: f64| -> Result<f64> {
            let v = if p.s == 1 {
                closed_form_s1(p, theta)?
            } else {
                // a negative result means F is below what this precision resolves
                ln_value_at(p, theta, bits)?.map_or(0.0, f64::exp).clamp(0.0, 1.0)
            };
            Ok(v - prob)
        };
        let (lo, hi, flo, fhi) = bracket(&mut f, p, prob)?;
        let (theta, iterations) = crate::roots::brent(&mut f, lo, hi, flo, fhi, 1e-10, 1e-15, 200)?;
        total_iter += iterations;

        let verified_bits = match bits {
            Some(b) => Some(agreed_value(p, theta, b)?.1),
            None => None,
        };
        if verified_bits == bits || total_iter > 1000 {
            return Ok(DistributionResult {
                value: theta,
                log_value: theta.ln(),
                diagnostics: Diagnostics {
                    normalization_residual: plan.residual,
                    iterations: total_iter,
                    elapsed_seconds: start.elapsed().as_secs_f64(),
                    precision_bits: bits.unwrap_or(53),
                },
            });
        }
        bits = verified_bits;
    }
}

/// A bracket around the quantile, seeded by the Tracy–Widom approximation
/// when it is available and widened geometrically until it straddles.
fn bracket<F>(f: &mut F, p: &BetaParams, prob: f64) -> Result<(f64, f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let full = Ok((0.0, 1.0, -prob, 1.0 - prob));
    let guess = match crate::tw_approx::approx_quantile_beta(p, prob) {
        Ok(g) if g.value > 0.0 && g.value < 1.0 => g.value,
        _ => return full,
    };
    let mut width = 0.01_f64.min(guess / 2.0).min((1.0 - guess) / 2.0).max(1e-6);
    for _ in 0..8 {
        let (lo, hi) = ((guess - width).max(0.0), (guess + width).min(1.0));
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if flo <= 0.0 && fhi >= 0.0 {
            return Ok((lo, hi, flo, fhi));
        }
        if lo == 0.0 && hi == 1.0 {
            break;
        }
        width *= 4.0;
    }
    full
}
