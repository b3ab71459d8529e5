//! Output records and their CSV / JSON-lines encodings.

use std::io::{self, Write};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// One emitted row. Exactly one of `alpha` (quantile queries) and `theta`
/// (CDF queries) is set, except for summary rows, which carry neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub s: usize,
    pub m: f64,
    pub n: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub method: String,
    pub value: f64,
    pub normalization_residual: f64,
    pub elapsed_seconds: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

const CSV_HEADER: [&str; 10] = [
    "s",
    "m",
    "n",
    "alpha",
    "theta",
    "method",
    "value",
    "normalization_residual",
    "elapsed_seconds",
    "warnings",
];

/// `v` with 10 significant digits: plain decimal for moderate magnitudes,
/// scientific otherwise.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    // let the scientific formatter do the rounding, then read the exponent
    let sci = format!("{v:.9e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        format!("{:.*}", (9 - exp).max(0) as usize, v)
    } else {
        sci
    }
}

fn csv_row(r: &OutputRecord) -> [String; 10] {
    let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
    [
        r.s.to_string(),
        fmt_sig(r.m),
        fmt_sig(r.n),
        opt(r.alpha),
        opt(r.theta),
        r.method.clone(),
        fmt_sig(r.value),
        fmt_sig(r.normalization_residual),
        fmt_sig(r.elapsed_seconds),
        r.warnings.join("; "),
    ]
}

/// Streams records in either format; CSV gets a header before the first row.
pub struct RecordWriter<W: Write> {
    inner: Inner<W>,
}

enum Inner<W: Write> {
    Csv(csv::Writer<W>, bool),
    Jsonl(W),
}

impl<W: Write> RecordWriter<W> {
    pub fn new(w: W, format: Format) -> Self {
        let inner = match format {
            Format::Csv => Inner::Csv(csv::Writer::from_writer(w), false),
            Format::Jsonl => Inner::Jsonl(w),
        };
        RecordWriter { inner }
    }

    pub fn write(&mut self, r: &OutputRecord) -> io::Result<()> {
        match &mut self.inner {
            Inner::Csv(w, header_done) => {
                if !*header_done {
                    w.write_record(CSV_HEADER)?;
                    *header_done = true;
                }
                w.write_record(csv_row(r))?;
            }
            Inner::Jsonl(w) => {
                serde_json::to_writer(&mut *w, r)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn write_all(&mut self, records: &[OutputRecord]) -> io::Result<()> {
        records.iter().try_for_each(|r| self.write(r))
    }

    pub fn finish(self) -> io::Result<()> {
        match self.inner {
            Inner::Csv(mut w, _) => w.flush(),
            Inner::Jsonl(mut w) => w.flush(),
        }
    }
}

/// Machine-readable description of a failed invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}
