//! CSV records and schema headers.

use std::fmt;
use std::io::Write;

use anyhow::Result;
use ssk_core::{Algorithm, HdrScalar};

use crate::workload::RNG_NAME;

pub const SYNTHETIC_SCHEMA: &str = "ssk-bench-synthetic/1";
pub const CORPUS_SCHEMA: &str = "ssk-bench-corpus/1";

/// Columns holding wall-clock measurements; everything else is a pure
/// function of the configuration and inputs.
pub const TIMING_COLUMNS: &[&str] = &["elapsed_nanoseconds"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Not run: the estimated footprint exceeds the memory limit.
    Oom,
    /// Not run: outside the algorithm's domain (brute force above its cap).
    Skipped,
    Error,
    Unreadable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Oom => "oom",
            Status::Skipped => "skipped",
            Status::Error => "error",
            Status::Unreadable => "unreadable",
        })
    }
}

/// One timed run of one algorithm on one synthetic pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub len_s: usize,
    pub len_t: usize,
    pub alphabet_size: usize,
    pub p: usize,
    pub lambda: f64,
    pub match_list_size: usize,
    pub pair_id: usize,
    pub repetition: usize,
    pub elapsed_nanoseconds: Option<u128>,
    /// `ln K_p`, `-inf` when the kernel is zero.
    pub kernel_value_log: Option<f64>,
    pub status: Status,
}

impl BenchRecord {
    pub const HEADER: [&'static str; 12] = [
        "algorithm",
        "len_s",
        "len_t",
        "alphabet_size",
        "p",
        "lambda",
        "match_list_size",
        "pair_id",
        "repetition",
        "elapsed_nanoseconds",
        "kernel_value_log",
        "status",
    ];

    pub fn fields(&self) -> [String; 12] {
        [
            self.algorithm.to_string(),
            self.len_s.to_string(),
            self.len_t.to_string(),
            self.alphabet_size.to_string(),
            self.p.to_string(),
            self.lambda.to_string(),
            self.match_list_size.to_string(),
            self.pair_id.to_string(),
            self.repetition.to_string(),
            optional(self.elapsed_nanoseconds),
            optional(self.kernel_value_log),
            self.status.to_string(),
        ]
    }
}

pub fn optional<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn log_value(k: HdrScalar) -> f64 {
    k.ln()
}

/// Writes the versioned comment line, then returns a CSV writer positioned
/// after it.
pub fn csv_writer<W: Write>(mut out: W, schema: &str, settings: &str) -> Result<csv::Writer<W>> {
    writeln!(out, "# schema={schema} rng={RNG_NAME} {settings}")?;
    Ok(csv::WriterBuilder::new().from_writer(out))
}

/// Drops comment lines and the named columns from a CSV document; used to
/// compare runs while ignoring wall-clock measurements.
pub fn strip_columns(csv_text: &str, drop: &[&str]) -> Result<String> {
    let body: String = csv_text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut keep: Option<Vec<bool>> = None;
    for row in reader.records() {
        let row = row?;
        let mask = keep.get_or_insert_with(|| row.iter().map(|c| !drop.contains(&c)).collect());
        writer.write_record(row.iter().zip(mask.iter()).filter(|(_, k)| **k).map(|(c, _)| c))?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}
