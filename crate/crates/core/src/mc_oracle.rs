//! Brute-force sampler of the null MANOVA model, used to validate the exact
//! distribution.
//!
//! Each replicate draws X (p × m_dim) and Y (p × n_dim) with independent
//! standard Gaussian entries, forms A = XXᵀ and B = YYᵀ, and returns the
//! largest eigenvalue of L⁻¹BL⁻ᵀ where A + B = LLᵀ. Complex ensembles use
//! circular Gaussians and are handled through the real 2p × 2p
//! representation of the Hermitian matrices, whose spectrum is the complex
//! spectrum with every eigenvalue doubled.
//!
//! Replicate `i` draws from ChaCha stream `i` of the configured seed, so
//! results do not depend on scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{FieldKind, ManovaDims};

/// Consecutive singular draws tolerated before a replicate gives up.
const MAX_RESAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub dims: ManovaDims,
    pub field: FieldKind,
    pub replicates: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(dims: ManovaDims, field: FieldKind, replicates: usize, seed: u64) -> Result<Self> {
        let cfg = McConfig {
            dims,
            field,
            replicates,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        if self.replicates == 0 {
            return Err(Error::InvalidParams("replicates must be at least 1".into()));
        }
        Ok(())
    }
}

/// Sorted Θ₁ samples; evaluates as the usual right-continuous step function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    pub sorted_samples: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// Draws discarded because A + B was numerically singular.
    pub resamples: usize,
}

/// Empirical and reference CDF at one empirical quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecilePoint {
    pub prob: f64,
    pub theta: f64,
    pub empirical: f64,
    pub reference: f64,
}

impl DecilePoint {
    pub fn deviation(&self) -> f64 {
        (self.empirical - self.reference).abs()
    }
}

impl EmpiricalCdf {
    /// Fraction of samples ≤ θ.
    pub fn eval(&self, theta: f64) -> f64 {
        let rank = self.sorted_samples.partition_point(|&x| x <= theta);
        rank as f64 / self.sorted_samples.len() as f64
    }

    /// Smallest sample whose empirical CDF reaches `prob`.
    pub fn quantile(&self, prob: f64) -> f64 {
        let n = self.sorted_samples.len();
        let k = ((prob * n as f64).ceil() as usize).clamp(1, n);
        self.sorted_samples[k - 1]
    }

    /// Compare against a reference CDF at the empirical deciles 0.1..0.9.
    pub fn compare_at_deciles<F>(&self, mut reference: F) -> Result<Vec<DecilePoint>>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        (1..10)
            .map(|k| {
                let prob = k as f64 / 10.0;
                let theta = self.quantile(prob);
                Ok(DecilePoint {
                    prob,
                    theta,
                    empirical: self.eval(theta),
                    reference: reference(theta)?,
                })
            })
            .collect()
    }

    /// Kolmogorov–Smirnov distance to a continuous reference CDF.
    pub fn ks_statistic<F: Fn(f64) -> f64>(&self, reference: F) -> f64 {
        let n = self.sorted_samples.len() as f64;
        self.sorted_samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = reference(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Θ₁ for replicate `replicate` of `cfg`.
pub fn sample_theta1(cfg: &McConfig, replicate: u64) -> Result<f64> {
    cfg.validate()?;
    sample_with_retries(cfg, replicate).map(|(theta, _)| theta)
}

fn sample_with_retries(cfg: &McConfig, replicate: u64) -> Result<(f64, usize)> {
    let mut rng = replicate_rng(cfg.seed, replicate);
    for retry in 0..MAX_RESAMPLES {
        if let Some(theta) = draw(cfg, &mut rng) {
            return Ok((theta, retry));
        }
    }
    Err(Error::Factorization(format!(
        "A + B singular in {MAX_RESAMPLES} consecutive draws (replicate {replicate})"
    )))
}

/// Runs all replicates (in parallel) and sorts the results.
pub fn empirical_cdf(cfg: &McConfig) -> Result<EmpiricalCdf> {
    cfg.validate()?;
    let draws: Vec<(f64, usize)> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| sample_with_retries(cfg, r))
        .collect::<Result<_>>()?;
    let resamples = draws.iter().map(|d| d.1).sum();
    let mut sorted_samples: Vec<f64> = draws.into_iter().map(|d| d.0).collect();
    sorted_samples.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf {
        sorted_samples,
        replicates: cfg.replicates,
        seed: cfg.seed,
        resamples,
    })
}

/// One draw, or `None` when A + B is not numerically positive definite.
fn draw(cfg: &McConfig, rng: &mut ChaCha8Rng) -> Option<f64> {
    let p = cfg.dims.p;
    let (a, b, order) = match cfg.field {
        FieldKind::Real => (gram_real(p, cfg.dims.m_dim, rng), gram_real(p, cfg.dims.n_dim, rng), p),
        FieldKind::Complex => (
            gram_complex(p, cfg.dims.m_dim, rng),
            gram_complex(p, cfg.dims.n_dim, rng),
            2 * p,
        ),
    };
    let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let l = cholesky(order, &sum)?;
    let w = whiten(order, &l, &b);
    let theta = jacobi_eigenvalues(order, w).into_iter().fold(f64::NEG_INFINITY, f64::max);
    Some(theta)
}

/// XXᵀ for a p × cols standard normal X, row-major p × p.
fn gram_real(p: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x: Vec<f64> = (0..p * cols).map(|_| rng.sample(StandardNormal)).collect();
    let mut g = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let v: f64 = (0..cols).map(|k| x[i * cols + k] * x[j * cols + k]).sum();
            g[i * p + j] = v;
            g[j * p + i] = v;
        }
    }
    g
}

/// XXᴴ for circular Gaussian X (E|xᵢⱼ|² = 1), as the real 2p × 2p matrix
/// [[Re, −Im], [Im, Re]].
fn gram_complex(p: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = || -> f64 { rng.sample::<f64, _>(StandardNormal) * scale };
    let (re, im): (Vec<f64>, Vec<f64>) = (0..p * cols).map(|_| (draw(), draw())).unzip();
    let q = 2 * p;
    let mut g = vec![0.0; q * q];
    for i in 0..p {
        for j in 0..p {
            // (XXᴴ)ᵢⱼ = Σ xᵢₖ conj(xⱼₖ)
            let (mut gr, mut gi) = (0.0, 0.0);
            for k in 0..cols {
                let (ar, ai) = (re[i * cols + k], im[i * cols + k]);
                let (br, bi) = (re[j * cols + k], im[j * cols + k]);
                gr += ar * br + ai * bi;
                gi += ai * br - ar * bi;
            }
            g[i * q + j] = gr;
            g[(i + p) * q + (j + p)] = gr;
            g[i * q + (j + p)] = -gi;
            g[(i + p) * q + j] = gi;
        }
    }
    g
}

/// Lower Cholesky factor, or `None` on a non-positive pivot.
fn cholesky(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let d = a[j * n + j] - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let v = a[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            l[i * n + j] = v / djj;
        }
    }
    Some(l)
}

/// L⁻¹ B L⁻ᵀ for symmetric B, symmetrized.
fn whiten(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    // solve L Z = M column by column, returning Z row-major
    let forward = |m: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; n * n];
        for c in 0..n {
            for i in 0..n {
                let s: f64 = (0..i).map(|k| l[i * n + k] * z[k * n + c]).sum();
                z[i * n + c] = (m[i * n + c] - s) / l[i * n + i];
            }
        }
        z
    };
    let w = forward(b);
    let wt: Vec<f64> = (0..n * n).map(|k| w[(k % n) * n + k / n]).collect();
    let mut m = forward(&wt);
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
    let frob: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
