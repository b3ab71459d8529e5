//! Exact and approximate null distribution of Roy's largest-root statistic.
//!
//! The exact CDF of the largest eigenvalue of a real multivariate beta
//! matrix is a normalizing constant times the Pfaffian of a skew-symmetric
//! matrix whose entries are built from incomplete beta functions by a short
//! recursion; the complex case is a plain determinant. Both are evaluated in
//! log space, in double precision when that is accurate enough and in MPFR
//! otherwise. Tracy–Widom based closed-form approximations and a Monte
//! Carlo sampler of the underlying MANOVA model round out the crate.

pub mod arith;
pub mod error;
pub mod linalg;
pub mod mc_oracle;
pub mod params;
pub mod roots;
pub mod roy_exact;
pub mod special_fn;
pub mod tw_approx;

pub use error::{Error, Result};
pub use mc_oracle::{empirical_cdf, sample_theta1, EmpiricalCdf, McConfig};
pub use params::{manova_to_beta, BetaParams, FieldKind, ManovaDims};
pub use roy_exact::{exact_cdf, exact_quantile, DistributionResult};
pub use tw_approx::{approx_cdf, approx_cdf_beta, approx_quantile, approx_quantile_beta, ApproxResult};
