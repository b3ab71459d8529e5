//! Library half of the `royroot` command-line tool: output records, their
//! encodings, and one function per subcommand.

pub mod commands;
pub mod record;

pub use commands::{
    cmd_bench, cmd_cdf, cmd_curve, cmd_mc, cmd_quantile, cmd_table, exit_code, BenchCase, McReport, Method,
    TableOutcome, TableRequest,
};
pub use record::{fmt_sig, ErrorRecord, Format, OutputRecord, RecordWriter};
