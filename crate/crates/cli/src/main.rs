use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use royroot::mc_oracle::McConfig;
use royroot::{BetaParams, Error, FieldKind, ManovaDims};
use royroot_cli::*;

/// Exact and approximate distribution of Roy's largest-root statistic.
#[derive(Parser)]
#[command(name = "royroot", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Either beta parameters (--s --m --n) or MANOVA dimensions
/// (--p --mdim --ndim), never both.
#[derive(Args, Debug)]
struct ParamArgs {
    /// Number of eigenvalues
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    n: Option<f64>,
    /// Dimension of the observations
    #[arg(long)]
    p: Option<usize>,
    /// Error degrees of freedom (columns of X, A = XXᵀ)
    #[arg(long)]
    mdim: Option<usize>,
    /// Hypothesis degrees of freedom (columns of Y, B = YYᵀ)
    #[arg(long)]
    ndim: Option<usize>,
    /// Complex Gaussian ensemble instead of real
    #[arg(long)]
    complex: bool,
}

impl ParamArgs {
    fn field(&self) -> FieldKind {
        if self.complex {
            FieldKind::Complex
        } else {
            FieldKind::Real
        }
    }

    fn beta(&self) -> Result<BetaParams, Error> {
        let field = self.field();
        match (self.s, self.m, self.n, self.p, self.mdim, self.ndim) {
            (Some(s), Some(m), Some(n), None, None, None) => BetaParams::new(s, m, n, field),
            (None, None, None, Some(_), Some(_), Some(_)) => self.dims()?.to_beta(field),
            _ => Err(Error::InvalidParams(
                "give either all of --s, --m, --n or all of --p, --mdim, --ndim, not both".into(),
            )),
        }
    }

    fn dims(&self) -> Result<ManovaDims, Error> {
        match (self.p, self.mdim, self.ndim) {
            (Some(p), Some(m_dim), Some(n_dim)) if self.s.is_none() && self.m.is_none() && self.n.is_none() => {
                ManovaDims::new(p, m_dim, n_dim)
            }
            _ => self.beta()?.to_manova_dims(),
        }
    }
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// P(Θ₁ ≤ θ)
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// θ with P(Θ₁ ≤ θ) = α
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Percentage points over a parameter grid (comma-separated lists)
    Table {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        m: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        n: Vec<f64>,
        /// Probability levels, strictly increasing
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long)]
        complex: bool,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// CDF on an equally spaced θ grid, for plotting
    Curve {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of grid points including both endpoints
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo check of the exact CDF at the empirical deciles
    Mc {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also emit every sample
        #[arg(long)]
        emit_samples: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Time the exact CDF on reference cases
    Bench {
        #[arg(long = "case", value_enum, value_delimiter = ',')]
        cases: Vec<BenchCase>,
        #[command(flatten)]
        out: OutArgs,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    /// Records were written but some of them failed.
    Partial(i32),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn emit(out: &OutArgs, records: &[OutputRecord]) -> io::Result<()> {
    let sink: Box<dyn Write> = match &out.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut w = RecordWriter::new(sink, out.format);
    w.write_all(records)?;
    w.finish()
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Cdf {
            params,
            theta,
            method,
            out,
        } => emit(&out, &cmd_cdf(&params.beta()?, theta, method)?)?,
        Cmd::Quantile {
            params,
            alpha,
            method,
            out,
        } => emit(&out, &cmd_quantile(&params.beta()?, alpha, method)?)?,
        Cmd::Table {
            s,
            m,
            n,
            alpha,
            complex,
            method,
            out,
        } => {
            let field = if complex { FieldKind::Complex } else { FieldKind::Real };
            let outcome = cmd_table(&TableRequest::new(alpha, s, m, n, field, method)?)?;
            emit(&out, &outcome.records)?;
            if outcome.exit_code != 0 {
                return Err(Failure::Partial(outcome.exit_code));
            }
        }
        Cmd::Curve {
            params,
            grid,
            method,
            out,
        } => emit(&out, &cmd_curve(&params.beta()?, grid, method)?)?,
        Cmd::Mc {
            params,
            replicates,
            seed,
            emit_samples,
            out,
        } => {
            let cfg = McConfig::new(params.dims()?, params.field(), replicates, seed)?;
            let report = cmd_mc(&cfg, emit_samples)?;
            emit(&out, &report.records)?;
            eprintln!("max |empirical - exact| over deciles: {}", fmt_sig(report.max_deviation));
        }
        Cmd::Bench { cases, out } => {
            let cases = if cases.is_empty() { BenchCase::ALL.to_vec() } else { cases };
            emit(&out, &cmd_bench(&cases)?)?;
        }
    }
    Ok(())
}

fn report(error: &str, message: String, exit_code: i32) -> ExitCode {
    let rec = ErrorRecord {
        error: error.into(),
        message,
        exit_code,
    };
    eprintln!("{}", serde_json::to_string(&rec).expect("error record serializes"));
    ExitCode::from(exit_code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report("invalid_arguments", e.render().to_string().trim().to_string(), 2),
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            let code = exit_code(&e);
            let kind = if code == 2 { "invalid_arguments" } else { "numerical_failure" };
            report(kind, e.to_string(), code)
        }
        Err(Failure::Io(e)) => report("io_error", e.to_string(), 1),
        Err(Failure::Partial(code)) => {
            let kind = if code == 2 { "invalid_arguments" } else { "numerical_failure" };
            report(kind, "one or more table cells failed; see their warnings".into(), code)
        }
    }
}
