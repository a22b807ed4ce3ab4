//! Timing grid over random string pairs.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use ssk_core::geometric::estimated_peak_bytes;
use ssk_core::oracle::ORACLE_CAP;
use ssk_core::{fits_native, match_count, Algorithm, KernelParams, KernelVector, MatchEntry, SymbolSeq};

use crate::config::BenchConfig;
use crate::record::{csv_writer, BenchRecord, Status, SYNTHETIC_SCHEMA};
use crate::workload::{cell_rng, gen_random_pair};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub records: usize,
    pub errors: usize,
    pub oom: usize,
    pub skipped: usize,
    /// Inputs that could not be read; reported but not fatal.
    pub warnings: usize,
}

impl RunSummary {
    pub(crate) fn count(&mut self, status: Status) {
        self.records += 1;
        match status {
            Status::Error => self.errors += 1,
            Status::Unreadable => self.warnings += 1,
            Status::Oom => self.oom += 1,
            Status::Skipped => self.skipped += 1,
            Status::Ok => {}
        }
    }
}

/// Rough peak heap use of one run, for the out-of-memory guard.
pub fn estimated_bytes(algorithm: Algorithm, m: usize, n: usize, matches: usize, params: KernelParams) -> usize {
    let native = fits_native(m + n, params.lambda());
    match algorithm {
        Algorithm::Brute | Algorithm::Trie { .. } => 0,
        Algorithm::Dp => 3 * params.p() * (n + 1) * 16,
        Algorithm::Sparse => matches * 3 * std::mem::size_of::<MatchEntry>() + (n + 1).next_power_of_two() * 16,
        Algorithm::Geometric => estimated_peak_bytes(matches, native),
    }
}

/// Why a run would not be attempted, if it would not.
pub(crate) fn precheck(
    algorithm: Algorithm,
    s: &SymbolSeq,
    t: &SymbolSeq,
    matches: usize,
    params: KernelParams,
    memory_limit: usize,
) -> Option<Status> {
    if algorithm == Algorithm::Brute && s.len().max(t.len()) > ORACLE_CAP {
        return Some(Status::Skipped);
    }
    if estimated_bytes(algorithm, s.len(), t.len(), matches, params) > memory_limit {
        return Some(Status::Oom);
    }
    None
}

/// Runs one algorithm once, returning the result and elapsed nanoseconds.
pub fn timed_run(
    algorithm: Algorithm,
    s: &SymbolSeq,
    t: &SymbolSeq,
    params: KernelParams,
) -> (ssk_core::Result<KernelVector>, u128) {
    let start = Instant::now();
    let result = black_box(algorithm.compute(black_box(s), black_box(t), params));
    (result, start.elapsed().as_nanos())
}

pub fn bench_synthetic<W: Write>(config: &BenchConfig, out: W) -> Result<RunSummary> {
    config.validate()?;
    let params = config.params()?;
    let algorithms = config.resolved_algorithms();
    let settings = format!(
        "seed={} p={} lambda={} g_max={} pairs={} repetitions={} warmup={}",
        config.seed, config.p, config.lambda, config.g_max, config.pairs, config.repetitions, config.warmup
    );
    let mut writer = csv_writer(out, SYNTHETIC_SCHEMA, &settings)?;
    writer.write_record(BenchRecord::HEADER)?;
    let mut summary = RunSummary::default();
    for &length in &config.lengths {
        for &alphabet in &config.alphabet_sizes {
            for pair_id in 0..config.pairs {
                let (s, t) = gen_random_pair(length, alphabet, &mut cell_rng(config.seed, length, alphabet, pair_id));
                let matches = match_count(&s, &t);
                for &algorithm in &algorithms {
                    let blocked = precheck(algorithm, &s, &t, matches, params, config.memory_limit_bytes);
                    if blocked.is_none() && config.warmup {
                        let _ = black_box(timed_run(algorithm, &s, &t, params));
                    }
                    for repetition in 0..config.repetitions {
                        let (status, elapsed, value) = match blocked {
                            Some(status) => (status, None, None),
                            None => match timed_run(algorithm, &s, &t, params) {
                                (Ok(k), ns) => (Status::Ok, Some(ns), Some(k.last().ln())),
                                (Err(_), ns) => (Status::Error, Some(ns), None),
                            },
                        };
                        let record = BenchRecord {
                            algorithm,
                            len_s: s.len(),
                            len_t: t.len(),
                            alphabet_size: alphabet,
                            p: config.p,
                            lambda: config.lambda,
                            match_list_size: matches,
                            pair_id,
                            repetition,
                            elapsed_nanoseconds: elapsed,
                            kernel_value_log: value,
                            status,
                        };
                        writer.write_record(record.fields())?;
                        summary.count(status);
                    }
                }
                writer.flush()?;
            }
        }
    }
    writer.flush()?;
    Ok(summary)
}
