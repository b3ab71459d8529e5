//! Parameter records shared by every part of the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real (orthogonally invariant) or complex (unitarily invariant) ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    #[default]
    Real,
    Complex,
}

/// The (s, m, n) triple indexing the multivariate beta eigenvalue law
/// with density ∝ ∏ θᵢᵐ (1-θᵢ)ⁿ ∏ |θᵢ-θⱼ|^β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub s: usize,
    pub m: f64,
    pub n: f64,
    pub field: FieldKind,
}

impl BetaParams {
    pub fn new(s: usize, m: f64, n: f64, field: FieldKind) -> Result<Self> {
        let p = BetaParams { s, m, n, field };
        p.validate()?;
        Ok(p)
    }

    pub fn real(s: usize, m: f64, n: f64) -> Result<Self> {
        Self::new(s, m, n, FieldKind::Real)
    }

    pub fn complex(s: usize, m: f64, n: f64) -> Result<Self> {
        Self::new(s, m, n, FieldKind::Complex)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::InvalidParams("s must be at least 1".into()));
        }
        if !(self.m > -1.0) || !self.m.is_finite() {
            return Err(Error::InvalidParams(format!("m = {} must exceed -1", self.m)));
        }
        if !(self.n > -1.0) || !self.n.is_finite() {
            return Err(Error::InvalidParams(format!("n = {} must exceed -1", self.n)));
        }
        Ok(())
    }

    /// MANOVA dimensions (p, m_dim, n_dim) that map onto these parameters,
    /// as reals since non-integer m, n have no integer preimage.
    pub fn effective_dims(&self) -> (f64, f64, f64) {
        let p = self.s as f64;
        match self.field {
            FieldKind::Real => (p, 2.0 * self.n + p + 1.0, 2.0 * self.m + p + 1.0),
            FieldKind::Complex => (p, self.n + p, self.m + p),
        }
    }

    /// Integer MANOVA dimensions mapping onto these parameters, if any.
    pub fn to_manova_dims(&self) -> Result<ManovaDims> {
        self.validate()?;
        let (p, m_dim, n_dim) = self.effective_dims();
        let as_dim = |v: f64, name: &str| -> Result<usize> {
            if v.fract() != 0.0 || v < p {
                return Err(Error::InvalidParams(format!(
                    "{name} = {v} implied by (s, m, n) = ({}, {}, {}) is not an integer >= p",
                    self.s, self.m, self.n
                )));
            }
            Ok(v as usize)
        };
        ManovaDims::new(self.s, as_dim(m_dim, "m_dim")?, as_dim(n_dim, "n_dim")?)
    }
}

/// Raw MANOVA dimensions: X is p × m_dim, Y is p × n_dim, A = XXᵀ, B = YYᵀ,
/// and Θ₁ is the largest eigenvalue of (A+B)⁻¹B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManovaDims {
    pub p: usize,
    pub m_dim: usize,
    pub n_dim: usize,
}

impl ManovaDims {
    pub fn new(p: usize, m_dim: usize, n_dim: usize) -> Result<Self> {
        let d = ManovaDims { p, m_dim, n_dim };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        if self.m_dim < self.p || self.n_dim < self.p {
            return Err(Error::InvalidParams(format!(
                "need m_dim >= p and n_dim >= p, got p = {}, m_dim = {}, n_dim = {}",
                self.p, self.m_dim, self.n_dim
            )));
        }
        Ok(())
    }

    /// s = p, m = (n_dim - p - 1)/2, n = (m_dim - p - 1)/2 for real data;
    /// m = n_dim - p, n = m_dim - p for complex data.
    pub fn to_beta(&self, field: FieldKind) -> Result<BetaParams> {
        self.validate()?;
        let p = self.p as f64;
        let (m, n) = match field {
            FieldKind::Real => (
                (self.n_dim as f64 - p - 1.0) / 2.0,
                (self.m_dim as f64 - p - 1.0) / 2.0,
            ),
            FieldKind::Complex => (self.n_dim as f64 - p, self.m_dim as f64 - p),
        };
        BetaParams::new(self.p, m, n, field)
    }
}

/// Translate MANOVA dimensions into beta parameters.
pub fn manova_to_beta(d: &ManovaDims, field: FieldKind) -> Result<BetaParams> {
    d.to_beta(field)
}
