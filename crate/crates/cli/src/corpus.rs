//! Timing runs over pairs of documents from a directory of text files.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ssk_core::{encode_texts, match_count, KernelParams, TokenMode};

use crate::config::BenchConfig;
use crate::record::{csv_writer, optional, Status, CORPUS_SCHEMA};
use crate::synthetic::{precheck, timed_run, RunSummary};

pub const HEADER: [&str; 14] = [
    "doc_s",
    "doc_t",
    "len_s",
    "len_t",
    "mean_size",
    "match_list_size",
    "inverse_match_frequency",
    "algorithm",
    "p",
    "lambda",
    "repetition",
    "elapsed_nanoseconds",
    "kernel_value_log",
    "status",
];

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusOptions {
    pub mode: TokenMode,
    pub p_values: Vec<usize>,
}

struct Document {
    name: String,
    text: String,
}

/// `|s| |t| / |L|`; infinite when the strings share no symbol.
pub fn inverse_match_frequency(len_s: usize, len_t: usize, matches: usize) -> f64 {
    (len_s as f64 * len_t as f64) / matches as f64
}

/// Sorts documents by token count and pairs neighbours, so each pair has
/// the closest lengths available; an odd document out is left unpaired.
fn pair_by_length(lengths: &[usize]) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&k| lengths[k]);
    order.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

pub fn bench_corpus<W: Write>(dir: &Path, config: &BenchConfig, options: &CorpusOptions, out: W) -> Result<RunSummary> {
    config.validate()?;
    for &p in &options.p_values {
        KernelParams::new(p, config.lambda)?;
    }
    let mut entries: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading corpus directory {}", dir.display()))?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .collect();
    entries.sort_by_key(|e| e.file_name());

    let settings = format!(
        "mode={:?} p_values={:?} lambda={} g_max={} repetitions={} warmup={}",
        options.mode, options.p_values, config.lambda, config.g_max, config.repetitions, config.warmup
    );
    let mut writer = csv_writer(out, CORPUS_SCHEMA, &settings)?;
    writer.write_record(HEADER)?;
    let mut summary = RunSummary::default();

    let mut docs = Vec::new();
    for entry in entries {
        let name = entry.file_name().to_string_lossy().into_owned();
        match fs::read_to_string(entry.path()) {
            Ok(text) => docs.push(Document { name, text }),
            Err(err) => {
                eprintln!("warning: skipping {name}: {err}");
                let mut row = vec![String::new(); HEADER.len()];
                row[0] = name;
                row[13] = Status::Unreadable.to_string();
                writer.write_record(&row)?;
                summary.count(Status::Unreadable);
            }
        }
    }

    let texts: Vec<&str> = docs.iter().map(|d| d.text.as_str()).collect();
    let (_, seqs) = encode_texts(&texts, options.mode);
    let lengths: Vec<usize> = seqs.iter().map(|s| s.len()).collect();
    let algorithms = config.resolved_algorithms();
    for (a, b) in pair_by_length(&lengths) {
        let (s, t) = (&seqs[a], &seqs[b]);
        let matches = match_count(s, t);
        let imf = inverse_match_frequency(s.len(), t.len(), matches);
        let mean = (s.len() + t.len()) as f64 / 2.0;
        for &p in &options.p_values {
            let params = KernelParams::new(p, config.lambda)?;
            for &algorithm in &algorithms {
                let blocked = precheck(algorithm, s, t, matches, params, config.memory_limit_bytes);
                if blocked.is_none() && config.warmup {
                    let _ = std::hint::black_box(timed_run(algorithm, s, t, params));
                }
                for repetition in 0..config.repetitions {
                    let (status, elapsed, value) = match blocked {
                        Some(status) => (status, None, None),
                        None => match timed_run(algorithm, s, t, params) {
                            (Ok(k), ns) => (Status::Ok, Some(ns), Some(k.last().ln())),
                            (Err(_), ns) => (Status::Error, Some(ns), None),
                        },
                    };
                    writer.write_record([
                        docs[a].name.clone(),
                        docs[b].name.clone(),
                        s.len().to_string(),
                        t.len().to_string(),
                        mean.to_string(),
                        matches.to_string(),
                        imf.to_string(),
                        algorithm.to_string(),
                        p.to_string(),
                        config.lambda.to_string(),
                        repetition.to_string(),
                        optional(elapsed),
                        optional(value),
                        status.to_string(),
                    ])?;
                    summary.count(status);
                }
            }
        }
        writer.flush()?;
    }
    writer.flush()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_takes_neighbours() {
        assert_eq!(pair_by_length(&[10, 3, 11, 4, 50]), [(1, 3), (0, 2)]);
        assert!(pair_by_length(&[7]).is_empty());
    }

    #[test]
    fn imf_of_disjoint_pair_is_infinite() {
        assert_eq!(inverse_match_frequency(3, 4, 0), f64::INFINITY);
        assert_eq!(inverse_match_frequency(3, 4, 6), 2.0);
    }
}
