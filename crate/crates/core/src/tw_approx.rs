//! Large-s approximation of the largest-root distribution.
//!
//! On the logit scale Θ₁ is asymptotically Tracy–Widom (order 1) after
//! centring by μ and scaling by σ. The Tracy–Widom law itself is replaced by
//! a shifted gamma surrogate `F₁(x) ≈ P(k, (x + α)/δ)`, which makes both the
//! CDF and its inverse closed-form. Only the real case is covered.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BetaParams, FieldKind, ManovaDims};
use crate::special_fn::{reg_inc_gamma_p, reg_inc_gamma_p_inv};

/// Centring and scaling of logit(Θ₁), plus the two angles they come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwApproxParams {
    pub mu: f64,
    pub sigma: f64,
    pub gamma_angle: f64,
    pub phi_angle: f64,
}

/// Shape, scale and shift of the gamma surrogate for the order-1
/// Tracy–Widom law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedGammaConstants {
    pub k: f64,
    pub delta: f64,
    pub alpha: f64,
}

pub const TW1_GAMMA: ShiftedGammaConstants = ShiftedGammaConstants {
    k: 46.446,
    delta: 0.186054,
    alpha: 9.84801,
};

/// An approximate probability or quantile with the parameters used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub value: f64,
    pub params: TwApproxParams,
    /// Set when the parameters lie outside the region where the
    /// approximation is known to be accurate.
    pub warnings: Vec<String>,
}

fn arccos_checked(arg: f64, what: &str) -> Result<f64> {
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::domain("tw_params", format!("{what} = {arg} outside [-1, 1]")));
    }
    Ok(arg.acos())
}

/// μ and σ for real-valued dimensions `p`, `m_dim`, `n_dim`.
///
/// Non-integer dimensions arise from non-integer beta parameters; the
/// formulas are used unchanged.
pub fn tw_params_real_dims(p: f64, m_dim: f64, n_dim: f64) -> Result<TwApproxParams> {
    let tot = m_dim + n_dim - 1.0;
    if !(tot > 0.0) {
        return Err(Error::domain("tw_params", format!("m_dim + n_dim - 1 = {tot} must be positive")));
    }
    let gamma = arccos_checked((m_dim + n_dim - 2.0 * p) / tot, "cos gamma")?;
    let phi = arccos_checked((m_dim - n_dim) / tot, "cos phi")?;
    let denom = tot * tot * (gamma + phi).sin().powi(2) * gamma.sin() * phi.sin();
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::domain(
            "tw_params",
            format!("sigma^3 denominator {denom} is not positive (gamma = {gamma}, phi = {phi})"),
        ));
    }
    let sigma = (16.0 / denom).cbrt();
    let mu = 2.0 * ((gamma + phi) / 2.0).tan().ln();
    if !mu.is_finite() {
        return Err(Error::domain("tw_params", format!("mu is not finite (gamma + phi = {})", gamma + phi)));
    }
    Ok(TwApproxParams {
        mu,
        sigma,
        gamma_angle: gamma,
        phi_angle: phi,
    })
}

/// μ and σ for a real MANOVA problem.
pub fn tw_params(d: &ManovaDims) -> Result<TwApproxParams> {
    d.validate()?;
    tw_params_real_dims(d.p as f64, d.m_dim as f64, d.n_dim as f64)
}

/// F₁(x) ≈ P(k, (x + α)/δ); zero for x ≤ −α.
pub fn tw1_cdf_approx(x: f64) -> f64 {
    let g = TW1_GAMMA;
    if x.is_nan() {
        return f64::NAN;
    }
    let z = (x + g.alpha) / g.delta;
    if z <= 0.0 {
        return 0.0;
    }
    reg_inc_gamma_p(g.k, z).expect("shape and argument are positive")
}

/// x with `tw1_cdf_approx(x) = y`: δ·P⁻¹(k, y) − α.
pub fn tw1_quantile_approx(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::domain("tw1_quantile_approx", format!("y = {y} must lie in (0, 1)")));
    }
    let g = TW1_GAMMA;
    Ok(g.delta * reg_inc_gamma_p_inv(g.k, y)? - g.alpha)
}

fn validity_warnings(b: &BetaParams) -> Vec<String> {
    let mut w = Vec::new();
    if b.m < -0.5 {
        w.push(format!("m = {} is below -1/2; the approximation is not validated there", b.m));
    }
    if b.n < 0.0 {
        w.push(format!("n = {} is negative; the approximation is not validated there", b.n));
    }
    w
}

fn real_only(b: &BetaParams) -> Result<()> {
    if b.field != FieldKind::Real {
        return Err(Error::InvalidParams(
            "the Tracy-Widom approximation is available for real ensembles only".into(),
        ));
    }
    Ok(())
}

fn cdf_with(t: &TwApproxParams, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain("approx_cdf", format!("theta = {theta} must lie strictly inside (0, 1)")));
    }
    let logit = (theta / (1.0 - theta)).ln();
    Ok(tw1_cdf_approx((logit - t.mu) / t.sigma))
}

fn quantile_with(t: &TwApproxParams, y: f64) -> Result<f64> {
    let x = tw1_quantile_approx(y).map_err(|_| Error::domain("approx_quantile", format!("y = {y} must lie in (0, 1)")))?;
    let l = t.sigma * x + t.mu;
    // inverse logit, written to stay accurate for large |l|
    Ok(if l >= 0.0 { 1.0 / (1.0 + (-l).exp()) } else { l.exp() / (1.0 + l.exp()) })
}

/// Approximate P(Θ₁ ≤ θ) for a real MANOVA problem:
/// `P(k, (logit θ − μ + σα)/(σδ))`.
pub fn approx_cdf(d: &ManovaDims, theta: f64) -> Result<ApproxResult> {
    approx_cdf_beta(&d.to_beta(FieldKind::Real)?, theta)
}

/// Approximate quantile: the inverse-logit of `σ(δ P⁻¹(k, y) − α) + μ`.
pub fn approx_quantile(d: &ManovaDims, y: f64) -> Result<ApproxResult> {
    approx_quantile_beta(&d.to_beta(FieldKind::Real)?, y)
}

/// [`approx_cdf`] for beta parameters, through their effective dimensions.
pub fn approx_cdf_beta(b: &BetaParams, theta: f64) -> Result<ApproxResult> {
    b.validate()?;
    real_only(b)?;
    let (p, m_dim, n_dim) = b.effective_dims();
    let params = tw_params_real_dims(p, m_dim, n_dim)?;
    Ok(ApproxResult {
        value: cdf_with(&params, theta)?,
        params,
        warnings: validity_warnings(b),
    })
}

/// [`approx_quantile`] for beta parameters.
pub fn approx_quantile_beta(b: &BetaParams, y: f64) -> Result<ApproxResult> {
    b.validate()?;
    real_only(b)?;
    let (p, m_dim, n_dim) = b.effective_dims();
    let params = tw_params_real_dims(p, m_dim, n_dim)?;
    Ok(ApproxResult {
        value: quantile_with(&params, y)?,
        params,
        warnings: validity_warnings(b),
    })
}
