use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Parameter records that violate their invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{routine} did not converge within {max_iter} iterations")]
    NoConvergence { routine: &'static str, max_iter: usize },

    /// The Pfaffian (real case) or determinant (complex case) of a CDF
    /// matrix came out negative, which only happens after catastrophic
    /// cancellation.
    #[error("negative determinant (log magnitude {log_abs}); working precision exhausted")]
    NegativeDeterminant { log_abs: f64 },

    #[error("precision escalation failed: residual {residual:e} at {bits} bits")]
    PrecisionEscalation { residual: f64, bits: u32 },

    /// Sampling hit a singular Gram matrix too many times in a row.
    #[error("factorization failed: {0}")]
    Factorization(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_invalid_input(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::InvalidParams(_))
    }
}
