//! Interchangeable scalar arithmetic.
//!
//! The exact CDF engine is written once against [`Arith`] and instantiated
//! with plain `f64` for the fast path and with [`Mp`] (an MPFR float of a
//! caller-chosen precision) when the double-precision result fails its
//! normalization self-check.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::{AddAssignRound, SubAssignRound};
use rug::Float;

use crate::special_fn;

/// Scalar field used by the generic numerical kernels.
pub trait Arith:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether the exponent range is wide enough that products of
    /// incomplete beta values and their reciprocals never over- or underflow.
    const WIDE_EXPONENT: bool;

    /// Whatever is needed to materialize constants (the precision for MPFR).
    type Ctx: Copy + Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn from_f64(v: f64, ctx: Self::Ctx) -> Self;
    fn to_f64(&self) -> f64;

    /// Unit roundoff of the representation, exactly.
    fn epsilon(ctx: Self::Ctx) -> Self;

    /// Significand bits.
    fn precision_bits(ctx: Self::Ctx) -> u32;

    fn abs(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn ln_1p(&self) -> Self;
    fn ln_gamma(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// `self -= a * b`, the inner step of every elimination kernel.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);
    /// `self += a`.
    fn add_assign_ref(&mut self, a: &Self);

    fn zero(ctx: Self::Ctx) -> Self {
        Self::from_f64(0.0, ctx)
    }

    fn one(ctx: Self::Ctx) -> Self {
        Self::from_f64(1.0, ctx)
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.abs()
            .partial_cmp(&other.abs())
            .unwrap_or(Ordering::Equal)
    }
}

impl Arith for f64 {
    const WIDE_EXPONENT: bool = false;
    type Ctx = ();

    fn ctx(&self) {}

    fn from_f64(v: f64, _: ()) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn epsilon(_: ()) -> f64 {
        f64::EPSILON
    }

    fn precision_bits(_: ()) -> u32 {
        f64::MANTISSA_DIGITS
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn ln_1p(&self) -> Self {
        f64::ln_1p(*self)
    }

    fn ln_gamma(&self) -> Self {
        special_fn::log_gamma(*self).unwrap_or(f64::NAN)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn add_assign_ref(&mut self, a: &Self) {
        *self += a;
    }
}

/// Multi-precision float; every operation rounds to nearest at the
/// precision of its left operand.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl Mp {
    pub fn new(v: f64, bits: u32) -> Self {
        Mp(Float::with_val(bits, v))
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }
}

impl Add for Mp {
    type Output = Mp;
    fn add(self, rhs: Mp) -> Mp {
        Mp(self.0 + rhs.0)
    }
}

impl Sub for Mp {
    type Output = Mp;
    fn sub(self, rhs: Mp) -> Mp {
        Mp(self.0 - rhs.0)
    }
}

impl Mul for Mp {
    type Output = Mp;
    fn mul(self, rhs: Mp) -> Mp {
        Mp(self.0 * rhs.0)
    }
}

impl Div for Mp {
    type Output = Mp;
    fn div(self, rhs: Mp) -> Mp {
        Mp(self.0 / rhs.0)
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Arith for Mp {
    // MPFR exponents span about ±2³⁰ bits
    const WIDE_EXPONENT: bool = true;
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.0.prec()
    }

    fn from_f64(v: f64, bits: u32) -> Self {
        Mp::new(v, bits)
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn epsilon(bits: u32) -> Mp {
        Mp(Float::with_val(bits, Float::u_exp(1, 1 - bits as i32)))
    }

    fn precision_bits(bits: u32) -> u32 {
        bits
    }

    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }

    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }

    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }

    fn ln_1p(&self) -> Self {
        Mp(self.0.clone().ln_1p())
    }

    fn ln_gamma(&self) -> Self {
        Mp(self.0.clone().ln_gamma())
    }

    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        self.0.sub_assign_round(&a.0 * &b.0, Round::Nearest);
    }

    fn add_assign_ref(&mut self, a: &Self) {
        self.0.add_assign_round(&a.0, Round::Nearest);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_keeps_precision_and_matches_f64() {
        let a = Mp::new(1.5, 256);
        let b = Mp::from_f64(0.25, 256);
        let c = (a.clone() * b.clone() + a.clone()) / b;
        assert_eq!(c.precision(), 256);
        assert_eq!(c.to_f64(), (1.5 * 0.25 + 1.5) / 0.25);
    }

    #[test]
    fn sub_mul_assign_is_fused_at_high_precision() {
        // 1 - (1 + 2^-100)(1 - 2^-100) = 2^-200, invisible in double.
        let tiny = Mp(Float::with_val(512, Float::i_exp(1, -100)));
        let one = Mp::one(512);
        let mut acc = Mp::one(512);
        acc.sub_mul_assign(&(one.clone() + tiny.clone()), &(one - tiny));
        assert_eq!(acc.to_f64(), 2f64.powi(-200));
    }

    #[test]
    fn mp_ln_gamma_agrees_with_double() {
        let x = Mp::new(10.5, 200);
        let want = special_fn::log_gamma(10.5).unwrap();
        assert!((x.ln_gamma().to_f64() - want).abs() < 1e-13 * want);
    }
}
