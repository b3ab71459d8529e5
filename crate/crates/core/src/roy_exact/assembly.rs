//! Matrix assembly for the exact CDF.
//!
//! Real case: the skew-symmetric matrix with entries
//! `a[i][j] = E(θ; m+j, m+i) - E(θ; m+i, m+j)`, where
//! `E(x; a, b) = ∫₀ˣ t^{a-1} (1-t)^n B(t; b, n+1) dt`, bordered by
//! `a[i][s+1] = B(θ; m+i, n+1)` when s is odd. Rows are filled left to right
//! from the diagonal value `E(θ; a, a) = B(θ; a, n+1)² / 2` using the ascent
//! `E(x; a, b+1) = (b E(x; a, b) - B(x; a+b, 2n+2)) / (b+n+1)` and the
//! reflection `E(x; b, a) = B(x; a, n+1) B(x; b, n+1) - E(x; a, b)`.
//!
//! Row and column i are scaled by `dᵢ = 1 / B(m+i, n+1)` while the matrix is
//! built. In scaled variables `ê(i, j) = E(m+i, m+j) dᵢ dⱼ` the ascent loses
//! its leading factor, `ê(i, j+1) = ê(i, j) - B(θ; 2m+i+j, 2n+2) dᵢ dⱼ₊₁ / (m+j+n+1)`,
//! and every entry stays O(1) at θ = 1.
//!
//! Complex case: the Hankel matrix `a[i][j] = B(θ; m+i+j-1, n+1)`, scaled
//! symmetrically so that its diagonal holds regularized values.

use crate::arith::Arith;
use crate::error::{Error, Result};
use crate::params::{BetaParams, FieldKind};
use crate::special_fn::{self, ln_inc_beta_ladder, AccuracySpec};

/// Even-order skew-symmetric matrix `A(θ)` together with the log of the
/// symmetric scaling applied to it: `ln Pf(original) = ln Pf(entries) + scale_log`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewPfaffianMatrix<T = f64> {
    pub order: usize,
    /// Row-major, `order × order`.
    pub entries: Vec<T>,
    pub scale_log: T,
}

impl<T: Arith> SkewPfaffianMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.order + j]
    }

    /// Largest |a[i][j] + a[j][i]| and largest |a[i][i]|, both zero for a
    /// skew-symmetric matrix.
    pub fn skew_defect(&self) -> f64 {
        let n = self.order;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j).clone() + self.get(j, i).clone()).abs().to_f64();
                worst = worst.max(d);
            }
        }
        worst
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::domain("build_pfaffian_matrix", format!("theta = {theta} outside [0, 1]")));
    }
    Ok(())
}

fn ln_complete_beta<T: Arith>(a: &T, b: &T) -> T {
    a.ln_gamma() + b.ln_gamma() - (a.clone() + b.clone()).ln_gamma()
}

/// Scaled matrix for the real case, in arithmetic `T`.
pub(crate) fn assemble_real<T: Arith>(p: &BetaParams, theta: f64, ctx: T::Ctx) -> Result<SkewPfaffianMatrix<T>> {
    check_theta(theta)?;
    let s = p.s;
    let order = s + s % 2;
    let acc = AccuracySpec::for_arith::<T>(ctx);
    let c = |v: f64| T::from_f64(v, ctx);
    let x = c(theta);
    let (m, n) = (c(p.m), c(p.n));
    let one = c(1.0);
    let n1 = n.clone() + one.clone();
    let n2 = n1.clone() + n1.clone();

    // ln dᵢ and the regularized B(θ; m+i, n+1), i = 1..=s
    let ln_b = ln_inc_beta_ladder(&x, &(m.clone() + one.clone()), s, &n1, &acc)?;
    let mut ln_d = Vec::with_capacity(s);
    let mut reg = Vec::with_capacity(s);
    for (i, lb) in (1..=s).zip(ln_b) {
        let ld = -ln_complete_beta(&(m.clone() + c(i as f64)), &n1);
        reg.push((lb + ld.clone()).exp());
        ln_d.push(ld);
    }
    // pair[k] = ln B(θ; 2m+k, 2n+2) for k = i+j in 2..=2s-2
    let two_m = m.clone() + m.clone();
    let mut pair = vec![c(f64::NEG_INFINITY); 2];
    pair.extend(ln_inc_beta_ladder(&x, &(two_m + c(2.0)), (2 * s).saturating_sub(3), &n2, &acc)?);

    // step(i, j) = B(θ; 2m+i+j, 2n+2)·dᵢ·dⱼ₊₁/(m+j+n+1), from linear factors
    // when the exponent range allows it and from logs otherwise
    let ln_w: Vec<T> = (0..s).map(|j| ln_d[j].clone() - (m.clone() + c(j as f64) + n1.clone()).ln()).collect();
    let lin = T::WIDE_EXPONENT.then(|| {
        let exp_all = |v: &[T]| v.iter().map(|x| x.exp()).collect::<Vec<T>>();
        (exp_all(&pair), exp_all(&ln_d), exp_all(&ln_w))
    });

    let mut entries = vec![c(0.0); order * order];
    for i in 1..=s {
        let mut e_hat = reg[i - 1].clone() * reg[i - 1].clone() / c(2.0);
        for j in i..s {
            let step = match &lin {
                Some((pair, d, w)) => pair[i + j].clone() * d[i - 1].clone() * w[j].clone(),
                None => (pair[i + j].clone() + ln_d[i - 1].clone() + ln_w[j].clone()).exp(),
            };
            e_hat = e_hat - step;
            let v = reg[i - 1].clone() * reg[j].clone() - c(2.0) * e_hat.clone();
            entries[(i - 1) * order + j] = v.clone();
            entries[j * order + (i - 1)] = -v;
        }
    }
    if s % 2 == 1 {
        for i in 0..s {
            entries[i * order + s] = reg[i].clone();
            entries[s * order + i] = -reg[i].clone();
        }
    }
    let mut scale_log = c(0.0);
    for ld in &ln_d {
        scale_log = scale_log - ld.clone();
    }
    Ok(SkewPfaffianMatrix {
        order,
        entries,
        scale_log,
    })
}

/// Scaled Hankel matrix for the complex case and its log-determinant
/// correction: `ln|A| = ln|entries| + scale_log`.
pub(crate) fn assemble_complex<T: Arith>(p: &BetaParams, theta: f64, ctx: T::Ctx) -> Result<(Vec<T>, T)> {
    check_theta(theta)?;
    let s = p.s;
    let acc = AccuracySpec::for_arith::<T>(ctx);
    let c = |v: f64| T::from_f64(v, ctx);
    let x = c(theta);
    let (m, n) = (c(p.m), c(p.n));
    let n1 = n + c(1.0);

    // half-log scale from the diagonal: dᵢ = B(m+2i-1, n+1)^{-1/2}
    let ln_d: Vec<T> = (1..=s)
        .map(|i| -ln_complete_beta(&(m.clone() + c((2 * i - 1) as f64)), &n1) / c(2.0))
        .collect();
    // hankel[k] = ln B(θ; m+k+1, n+1) for k = i+j (0-based) in 0..=2s-2
    let hankel = ln_inc_beta_ladder(&x, &(m.clone() + c(1.0)), 2 * s - 1, &n1, &acc)?;

    let lin = T::WIDE_EXPONENT.then(|| {
        let exp_all = |v: &[T]| v.iter().map(|x| x.exp()).collect::<Vec<T>>();
        (exp_all(&hankel), exp_all(&ln_d))
    });

    let mut entries = vec![c(0.0); s * s];
    for i in 0..s {
        for j in i..s {
            let v = match &lin {
                Some((h, d)) => h[i + j].clone() * d[i].clone() * d[j].clone(),
                None => (hankel[i + j].clone() + ln_d[i].clone() + ln_d[j].clone()).exp(),
            };
            entries[j * s + i] = v.clone();
            entries[i * s + j] = v;
        }
    }
    let mut scale_log = c(0.0);
    for ld in &ln_d {
        scale_log = scale_log - ld.clone() - ld.clone();
    }
    Ok((entries, scale_log))
}

/// The skew-symmetric CDF matrix `A(θ)` for a real ensemble, in double
/// precision, with its diagonal scaling recorded in `scale_log`.
pub fn build_pfaffian_matrix(p: &BetaParams, theta: f64) -> Result<SkewPfaffianMatrix<f64>> {
    p.validate()?;
    if p.field != FieldKind::Real {
        return Err(Error::InvalidParams(
            "the Pfaffian matrix exists only for real ensembles".into(),
        ));
    }
    assemble_real::<f64>(p, theta, ())
}

/// `E(x; a, b) = ∫₀ˣ t^{a-1} (1-t)^n B(t; b, n+1) dt`, evaluated by the
/// beta-squared base case, the ascent in b, and the reflection. Requires
/// `b - a` to be an integer.
pub fn script_e(x: f64, a: f64, b: f64, n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(a > 0.0) || !(b > 0.0) || !(n > -1.0) {
        return Err(Error::domain(
            "script_e",
            format!("need x in [0,1], a > 0, b > 0, n > -1; got ({x}, {a}, {b}, {n})"),
        ));
    }
    let diff = b - a;
    if (diff - diff.round()).abs() > 1e-12 {
        return Err(Error::domain(
            "script_e",
            format!("b - a = {diff} is not an integer; the ladder cannot reach it"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let steps = diff.round() as i64;
    if steps < 0 {
        let ba = special_fn::inc_beta_lower(x, a, n + 1.0)?;
        let bb = special_fn::inc_beta_lower(x, b, n + 1.0)?;
        return Ok(ba * bb - script_e(x, b, a, n)?);
    }
    let mut e = special_fn::inc_beta_lower(x, a, n + 1.0)?.powi(2) / 2.0;
    for t in 0..steps {
        let bb = a + t as f64;
        e = (bb * e - special_fn::inc_beta_lower(x, a + bb, 2.0 * n + 2.0)?) / (bb + n + 1.0);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::inc_beta_lower;

    #[test]
    fn zero_theta_gives_zero_matrix() {
        for s in [1, 2, 5] {
            let a = build_pfaffian_matrix(&BetaParams::real(s, -0.5, 3.0).unwrap(), 0.0).unwrap();
            assert!(a.entries.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn order_is_even() {
        for s in 1..=6 {
            let a = build_pfaffian_matrix(&BetaParams::real(s, 0.0, 1.0).unwrap(), 0.5).unwrap();
            assert_eq!(a.order, s + s % 2);
            assert_eq!(a.skew_defect(), 0.0);
        }
    }

    #[test]
    fn s_one_is_the_border_entry() {
        let p = BetaParams::real(1, 0.5, 2.0).unwrap();
        let a = build_pfaffian_matrix(&p, 0.3).unwrap();
        let unscaled = a.get(0, 1) * a.scale_log.exp();
        assert!((unscaled - inc_beta_lower(0.3, 1.5, 3.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn unscaled_entries_follow_definition() {
        // a[i][j] = E(m+j, m+i) - E(m+i, m+j), via the independent ladder
        let p = BetaParams::real(4, 0.5, 2.0).unwrap();
        let theta = 0.45;
        let a = build_pfaffian_matrix(&p, theta).unwrap();
        let d: Vec<f64> = (1..=4)
            .map(|i| (-special_fn::ln_beta(p.m + i as f64, p.n + 1.0).unwrap()).exp())
            .collect();
        for i in 1..=4 {
            for j in 1..=4 {
                let (ai, aj) = (p.m + i as f64, p.m + j as f64);
                let want = script_e(theta, aj, ai, p.n).unwrap() - script_e(theta, ai, aj, p.n).unwrap();
                let got = a.get(i - 1, j - 1) / (d[i - 1] * d[j - 1]);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-6), "({i},{j}) {got} {want}");
            }
        }
    }

    #[test]
    fn script_e_base_case() {
        let (x, a, n) = (0.4, 1.5, 2.0);
        let want = inc_beta_lower(x, a, n + 1.0).unwrap().powi(2) / 2.0;
        assert_eq!(script_e(x, a, a, n).unwrap(), want);
        assert_eq!(script_e(0.0, 1.5, 3.5, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn script_e_rejects_unreachable_pairs() {
        assert!(script_e(0.5, 1.0, 1.5, 2.0).is_err());
        assert!(script_e(1.5, 1.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn complex_hankel_is_symmetric() {
        let p = BetaParams::complex(3, 1.0, 2.0).unwrap();
        let (e, _) = assemble_complex::<f64>(&p, 0.6, ()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(e[i * 3 + j], e[j * 3 + i]);
            }
        }
    }

    #[test]
    fn rejects_complex_and_bad_theta() {
        assert!(build_pfaffian_matrix(&BetaParams::complex(2, 0.0, 0.0).unwrap(), 0.5).is_err());
        assert!(build_pfaffian_matrix(&BetaParams::real(2, 0.0, 0.0).unwrap(), 1.5).is_err());
    }
}
