//! Subcommand implementations. Each returns the records to emit; parsing,
//! output and exit codes are handled by the binary.

use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;

use royroot::mc_oracle::{empirical_cdf, McConfig};
use royroot::tw_approx::{approx_cdf_beta, approx_quantile_beta};
use royroot::{exact_cdf, exact_quantile, BetaParams, DistributionResult, Error, FieldKind, Result};

use crate::record::OutputRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    Exact,
    Approx,
    Both,
}

impl Method {
    fn tags(self) -> &'static [&'static str] {
        match self {
            Method::Exact => &["exact"],
            Method::Approx => &["approx"],
            Method::Both => &["exact", "approx"],
        }
    }
}

/// Exit status for a library error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_invalid_input() {
        2
    } else {
        3
    }
}

enum Query {
    Cdf(f64),
    Quantile(f64),
}

fn base(p: &BetaParams, q: &Query, method: &str) -> OutputRecord {
    let (alpha, theta) = match *q {
        Query::Cdf(t) => (None, Some(t)),
        Query::Quantile(a) => (Some(a), None),
    };
    OutputRecord {
        s: p.s,
        m: p.m,
        n: p.n,
        alpha,
        theta,
        method: method.into(),
        value: f64::NAN,
        normalization_residual: 0.0,
        elapsed_seconds: 0.0,
        warnings: Vec::new(),
    }
}

fn from_exact(mut r: OutputRecord, d: DistributionResult) -> OutputRecord {
    r.value = d.value;
    r.normalization_residual = d.diagnostics.normalization_residual;
    r.elapsed_seconds = d.diagnostics.elapsed_seconds;
    r
}

/// The approximate CDF, extended by its limits 0 and 1 outside (0, 1).
fn approx_cdf_extended(p: &BetaParams, theta: f64) -> Result<(f64, Vec<String>)> {
    if theta <= 0.0 || theta >= 1.0 {
        // still validate the parameters
        let mid = approx_cdf_beta(p, 0.5)?;
        return Ok((if theta <= 0.0 { 0.0 } else { 1.0 }, mid.warnings));
    }
    let r = approx_cdf_beta(p, theta)?;
    Ok((r.value, r.warnings))
}

fn evaluate(p: &BetaParams, q: &Query, tag: &str) -> Result<OutputRecord> {
    let rec = base(p, q, tag);
    let start = Instant::now();
    match (tag, q) {
        ("exact", Query::Cdf(t)) => Ok(from_exact(rec, exact_cdf(p, *t)?)),
        ("exact", Query::Quantile(a)) => Ok(from_exact(rec, exact_quantile(p, *a)?)),
        (_, Query::Cdf(t)) => {
            let (value, warnings) = approx_cdf_extended(p, *t)?;
            Ok(OutputRecord {
                value,
                warnings,
                elapsed_seconds: start.elapsed().as_secs_f64(),
                ..rec
            })
        }
        (_, Query::Quantile(a)) => {
            let r = approx_quantile_beta(p, *a)?;
            Ok(OutputRecord {
                value: r.value,
                warnings: r.warnings,
                elapsed_seconds: start.elapsed().as_secs_f64(),
                ..rec
            })
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("theta = {theta} is not finite")))
    }
}

pub fn cmd_cdf(p: &BetaParams, theta: f64, method: Method) -> Result<Vec<OutputRecord>> {
    p.validate()?;
    check_theta(theta)?;
    method.tags().iter().map(|tag| evaluate(p, &Query::Cdf(theta), tag)).collect()
}

pub fn cmd_quantile(p: &BetaParams, alpha: f64, method: Method) -> Result<Vec<OutputRecord>> {
    p.validate()?;
    method.tags().iter().map(|tag| evaluate(p, &Query::Quantile(alpha), tag)).collect()
}

/// A grid of percentage points to tabulate.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRequest {
    pub alpha_levels: Vec<f64>,
    pub s_list: Vec<usize>,
    pub m_list: Vec<f64>,
    pub n_list: Vec<f64>,
    pub field: FieldKind,
    pub method: Method,
}

impl TableRequest {
    pub fn new(
        alpha_levels: Vec<f64>,
        s_list: Vec<usize>,
        m_list: Vec<f64>,
        n_list: Vec<f64>,
        field: FieldKind,
        method: Method,
    ) -> Result<Self> {
        let req = TableRequest {
            alpha_levels,
            s_list,
            m_list,
            n_list,
            field,
            method,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha_levels.is_empty() || self.s_list.is_empty() || self.m_list.is_empty() || self.n_list.is_empty() {
            return Err(Error::InvalidParams("table grids must be nonempty".into()));
        }
        if !self.alpha_levels.iter().all(|a| *a > 0.0 && *a < 1.0) {
            return Err(Error::InvalidParams("alpha levels must lie in (0, 1)".into()));
        }
        if !self.alpha_levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams("alpha levels must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Records of a table run, with the most severe per-cell exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOutcome {
    pub records: Vec<OutputRecord>,
    /// 0 when every cell succeeded.
    pub exit_code: i32,
}

/// One record per (s, m, n, α, method) cell in grid order. Failed cells are
/// emitted with value NaN and the error among their warnings.
pub fn cmd_table(req: &TableRequest) -> Result<TableOutcome> {
    req.validate()?;
    let mut cells = Vec::new();
    for &s in &req.s_list {
        for &m in &req.m_list {
            for &n in &req.n_list {
                for &alpha in &req.alpha_levels {
                    for tag in req.method.tags() {
                        cells.push((s, m, n, alpha, *tag));
                    }
                }
            }
        }
    }
    let results: Vec<(OutputRecord, i32)> = cells
        .par_iter()
        .map(|&(s, m, n, alpha, tag)| {
            let p = BetaParams { s, m, n, field: req.field };
            let q = Query::Quantile(alpha);
            match p.validate().and_then(|_| evaluate(&p, &q, tag)) {
                Ok(r) => (r, 0),
                Err(e) => {
                    let mut r = base(&p, &q, tag);
                    r.warnings.push(format!("error: {e}"));
                    (r, exit_code(&e))
                }
            }
        })
        .collect();
    // invalid input outranks numerical failure
    let exit_code = results.iter().map(|r| r.1).fold(0, |acc, c| match (acc, c) {
        (2, _) | (_, 2) => 2,
        (a, b) => a.max(b),
    });
    Ok(TableOutcome {
        records: results.into_iter().map(|r| r.0).collect(),
        exit_code,
    })
}

/// CDF values on `grid_size` equally spaced points of [0, 1].
pub fn cmd_curve(p: &BetaParams, grid_size: usize, method: Method) -> Result<Vec<OutputRecord>> {
    p.validate()?;
    if grid_size < 2 {
        return Err(Error::InvalidParams("grid size must be at least 2".into()));
    }
    let thetas: Vec<f64> = (0..grid_size).map(|k| k as f64 / (grid_size - 1) as f64).collect();
    let mut records = Vec::with_capacity(thetas.len() * method.tags().len());
    for tag in method.tags() {
        let column: Vec<OutputRecord> = thetas
            .par_iter()
            .map(|&t| evaluate(p, &Query::Cdf(t), tag))
            .collect::<Result<_>>()?;
        records.extend(column);
    }
    Ok(records)
}

/// Monte Carlo run summarized at the empirical deciles.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub records: Vec<OutputRecord>,
    pub max_deviation: f64,
}

/// Empirical CDF at its deciles next to the exact CDF there, followed by a
/// summary row (`method = "mc_max_deviation"`) and, optionally, every
/// sample (`method = "mc_sample"`).
pub fn cmd_mc(cfg: &McConfig, emit_samples: bool) -> Result<McReport> {
    cfg.validate()?;
    let p = cfg.dims.to_beta(cfg.field)?;
    let start = Instant::now();
    let emp = empirical_cdf(cfg)?;
    let mc_seconds = start.elapsed().as_secs_f64();

    let mut worst_residual: f64 = 0.0;
    let deciles = emp.compare_at_deciles(|t| {
        let r = exact_cdf(&p, t)?;
        worst_residual = worst_residual.max(r.diagnostics.normalization_residual);
        Ok(r.value)
    })?;
    let max_deviation = deciles.iter().map(|d| d.deviation()).fold(0.0, f64::max);
    let run_info = format!("replicates={} seed={} resamples={}", emp.replicates, emp.seed, emp.resamples);

    let mut records = Vec::new();
    for d in &deciles {
        let mut mc = base(&p, &Query::Cdf(d.theta), "mc");
        mc.value = d.empirical;
        mc.elapsed_seconds = mc_seconds;
        mc.warnings.push(run_info.clone());
        let mut exact = base(&p, &Query::Cdf(d.theta), "exact");
        exact.value = d.reference;
        exact.normalization_residual = worst_residual;
        records.push(mc);
        records.push(exact);
    }
    let mut summary = base(&p, &Query::Cdf(f64::NAN), "mc_max_deviation");
    summary.theta = None;
    summary.value = max_deviation;
    summary.normalization_residual = worst_residual;
    summary.elapsed_seconds = start.elapsed().as_secs_f64();
    summary.warnings.push(run_info);
    records.push(summary);

    if emit_samples {
        let n = emp.sorted_samples.len() as f64;
        for (i, &x) in emp.sorted_samples.iter().enumerate() {
            let mut r = base(&p, &Query::Cdf(x), "mc_sample");
            r.value = (i + 1) as f64 / n;
            records.push(r);
        }
    }
    Ok(McReport { records, max_deviation })
}

/// Named timing cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchCase {
    /// s = 54, m = -1/2, n = 45/2 at its 95th percentile; target < 1 s.
    S54,
    /// s = 200, m = -1/2, n = 299/2 at its 99th percentile; target < 15 s.
    S200,
    /// s = 1, m = n = 0 at θ = 1/2; target < 1 ms.
    S1,
}

impl BenchCase {
    pub const ALL: [BenchCase; 3] = [BenchCase::S1, BenchCase::S54, BenchCase::S200];

    /// Parameters, evaluation point and target wall-clock seconds.
    pub fn setup(self) -> (BetaParams, f64, f64) {
        let real = |s, m, n| BetaParams { s, m, n, field: FieldKind::Real };
        match self {
            BenchCase::S54 => (real(54, -0.5, 22.5), 0.9194087361, 1.0),
            BenchCase::S200 => (real(200, -0.5, 149.5), 0.827760, 15.0),
            BenchCase::S1 => (real(1, 0.0, 0.0), 0.5, 1e-3),
        }
    }
}

/// Times one exact CDF evaluation per case. Slow hardware only changes the
/// warning text, never the outcome.
pub fn cmd_bench(cases: &[BenchCase]) -> Result<Vec<OutputRecord>> {
    cases
        .iter()
        .map(|case| {
            let (p, theta, target) = case.setup();
            let mut r = evaluate(&p, &Query::Cdf(theta), "exact")?;
            let verdict = if r.elapsed_seconds < target { "met" } else { "missed" };
            r.warnings.push(format!("target < {target} s: {verdict}"));
            Ok(r)
        })
        .collect()
}
