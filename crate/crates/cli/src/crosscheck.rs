//! Pairwise agreement of kernel algorithms on random inputs.

use anyhow::Result;
use rand::Rng;
use ssk_core::oracle::ORACLE_CAP;
use ssk_core::{Algorithm, HdrScalar, KernelParams, KernelVector, SymbolSeq};

use crate::config::BenchConfig;
use crate::workload::{cell_rng, random_seq};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Mutation-test hook: multiplies one level of one algorithm's output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub algorithm: Algorithm,
    pub level: usize,
    pub factor: f64,
}

impl std::str::FromStr for Perturbation {
    type Err = String;

    /// `ALGORITHM:LEVEL:FACTOR`, e.g. `sparse:2:1.001`.
    fn from_str(text: &str) -> std::result::Result<Self, String> {
        let (rest, factor) = text.rsplit_once(':').ok_or("expected ALGORITHM:LEVEL:FACTOR")?;
        let (name, level) = rest.rsplit_once(':').ok_or("expected ALGORITHM:LEVEL:FACTOR")?;
        Ok(Perturbation {
            algorithm: name.parse()?,
            level: level.parse().map_err(|_| format!("bad level {level:?}"))?,
            factor: factor.parse().map_err(|_| format!("bad factor {factor:?}"))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub pair: String,
    pub algorithm: Algorithm,
    pub reference: Algorithm,
    pub level: usize,
    pub deviation: f64,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} disagrees with {} at level {} (relative deviation {:.3e})",
            self.pair, self.algorithm, self.reference, self.level, self.deviation
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrosscheckReport {
    pub pairs_checked: usize,
    pub comparisons: usize,
    pub max_deviation: f64,
    pub mismatches: Vec<Mismatch>,
    /// Algorithms that could not run on some pair, e.g. brute force above its cap.
    pub skipped: usize,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.comparisons > 0
    }
}

/// Relative deviation of two nonnegative values via their logarithms.
pub fn log_deviation(a: HdrScalar, b: HdrScalar) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 0.0,
        (false, false) => (a.ln() - b.ln()).abs().exp_m1(),
        _ => f64::INFINITY,
    }
}

pub struct Crosschecker {
    algorithms: Vec<Algorithm>,
    tolerance: f64,
    perturbation: Option<Perturbation>,
}

impl Crosschecker {
    /// Needs at least two algorithms, at least one of them exact.
    pub fn new(algorithms: Vec<Algorithm>, tolerance: f64) -> Result<Self> {
        if algorithms.len() < 2 {
            anyhow::bail!("cross-checking needs at least two algorithms");
        }
        if !algorithms.iter().any(Algorithm::is_exact) {
            anyhow::bail!("cross-checking needs an exact algorithm as reference");
        }
        Ok(Crosschecker {
            algorithms,
            tolerance,
            perturbation: None,
        })
    }

    pub fn with_perturbation(mut self, perturbation: Option<Perturbation>) -> Self {
        self.perturbation = perturbation;
        self
    }

    fn run(&self, algorithm: Algorithm, s: &SymbolSeq, t: &SymbolSeq, params: KernelParams) -> Option<KernelVector> {
        if algorithm == Algorithm::Brute && s.len().max(t.len()) > ORACLE_CAP {
            return None;
        }
        let mut k = algorithm.compute(s, t, params).ok()?;
        if let Some(pert) = self.perturbation {
            if pert.algorithm.name() == algorithm.name() && (1..=k.p()).contains(&pert.level) {
                k.values_mut()[pert.level - 1] = k.level(pert.level).scale(pert.factor);
            }
        }
        Some(k)
    }

    /// Compares every algorithm against the first exact one that ran.
    ///
    /// The trie result is held to equality only on levels where its gap cap
    /// admits every occurrence, `g_max >= max(|s|,|t|) - q`, and must not
    /// exceed the reference elsewhere.
    pub fn check_pair(&self, label: &str, s: &SymbolSeq, t: &SymbolSeq, params: KernelParams, report: &mut CrosscheckReport) {
        let results: Vec<(Algorithm, Option<KernelVector>)> =
            self.algorithms.iter().map(|&a| (a, self.run(a, s, t, params))).collect();
        report.pairs_checked += 1;
        report.skipped += results.iter().filter(|(_, k)| k.is_none()).count();
        let Some((reference, want)) = results
            .iter()
            .find_map(|(a, k)| k.as_ref().filter(|_| a.is_exact()).map(|k| (*a, k)))
        else {
            return;
        };
        let longest = s.len().max(t.len());
        for (algorithm, got) in &results {
            let Some(got) = got else { continue };
            if *algorithm == reference {
                continue;
            }
            for q in 1..=params.p() {
                let (a, b) = (got.level(q), want.level(q));
                let exact_here = match algorithm {
                    Algorithm::Trie { g_max } => g_max + q >= longest,
                    _ => true,
                };
                let deviation = if exact_here {
                    log_deviation(a, b)
                } else if a <= b.scale(1.0 + self.tolerance) {
                    0.0
                } else {
                    log_deviation(a, b)
                };
                report.comparisons += 1;
                report.max_deviation = report.max_deviation.max(deviation);
                if deviation > self.tolerance {
                    report.mismatches.push(Mismatch {
                        pair: label.to_string(),
                        algorithm: *algorithm,
                        reference,
                        level: q,
                        deviation,
                    });
                }
            }
        }
    }
}

/// Random pairs for every `(length, alphabet, pair_id)` cell of the config;
/// each string length is drawn uniformly from `0..=length`.
pub fn crosscheck(config: &BenchConfig, tolerance: f64, perturbation: Option<Perturbation>) -> Result<CrosscheckReport> {
    config.validate()?;
    let params = config.params()?;
    let checker = Crosschecker::new(config.resolved_algorithms(), tolerance)?.with_perturbation(perturbation);
    let mut report = CrosscheckReport::default();
    for &length in &config.lengths {
        for &alphabet in &config.alphabet_sizes {
            for pair in 0..config.pairs {
                let mut rng = cell_rng(config.seed, length, alphabet, pair);
                let (m, n) = (rng.gen_range(0..=length), rng.gen_range(0..=length));
                let s = random_seq(m, alphabet, &mut rng);
                let t = random_seq(n, alphabet, &mut rng);
                let label = format!("length<={length} alphabet={alphabet} pair={pair} (|s|={m}, |t|={n})");
                checker.check_pair(&label, &s, &t, params, &mut report);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssk_core::encode_pair;

    fn exact_all() -> Vec<Algorithm> {
        vec![Algorithm::Brute, Algorithm::Dp, Algorithm::Sparse, Algorithm::Geometric]
    }

    #[test]
    fn running_example_passes_with_trie() {
        let (s, t) = encode_pair("gatta", "cata");
        let mut algorithms = exact_all();
        algorithms.push(Algorithm::Trie { g_max: 5 });
        let checker = Crosschecker::new(algorithms, DEFAULT_TOLERANCE).unwrap();
        let mut report = CrosscheckReport::default();
        checker.check_pair("gatta/cata", &s, &t, KernelParams::new(3, 0.5).unwrap(), &mut report);
        assert!(report.passed(), "{:?}", report.mismatches);
        assert_eq!(report.comparisons, 4 * 3);
    }

    #[test]
    fn random_suite_passes() {
        let config = BenchConfig {
            algorithms: vec![Algorithm::Dp, Algorithm::Sparse, Algorithm::Geometric, Algorithm::Trie { g_max: 0 }],
            lengths: vec![64],
            alphabet_sizes: vec![2, 8, 64],
            pairs: 20,
            p: 6,
            g_max: 3,
            seed: 1,
            ..BenchConfig::default()
        };
        let report = crosscheck(&config, DEFAULT_TOLERANCE, None).unwrap();
        assert!(report.passed(), "{:?}", report.mismatches.first());
        assert_eq!(report.pairs_checked, 60);
    }

    #[test]
    fn perturbation_is_reported() {
        let config = BenchConfig {
            algorithms: exact_all(),
            lengths: vec![10],
            alphabet_sizes: vec![2],
            pairs: 3,
            p: 3,
            seed: 9,
            ..BenchConfig::default()
        };
        let pert: Perturbation = "sparse:2:1.000001".parse().unwrap();
        let report = crosscheck(&config, DEFAULT_TOLERANCE, Some(pert)).unwrap();
        assert!(!report.passed());
        assert!(report
            .mismatches
            .iter()
            .all(|m| m.algorithm == Algorithm::Sparse && m.level == 2));
        let text = report.mismatches[0].to_string();
        assert!(text.contains("sparse") && text.contains("level 2"), "{text}");
    }

    #[test]
    fn brute_force_is_skipped_above_cap() {
        let config = BenchConfig {
            algorithms: exact_all(),
            lengths: vec![40],
            alphabet_sizes: vec![4],
            pairs: 4,
            p: 3,
            seed: 2,
            ..BenchConfig::default()
        };
        let report = crosscheck(&config, DEFAULT_TOLERANCE, None).unwrap();
        assert!(report.passed());
        assert!(report.skipped > 0);
    }

    #[test]
    fn needs_two_algorithms() {
        assert!(Crosschecker::new(vec![Algorithm::Dp], 1e-9).is_err());
        assert!(Crosschecker::new(vec![Algorithm::Trie { g_max: 1 }, Algorithm::Trie { g_max: 2 }], 1e-9).is_err());
    }

    #[test]
    fn deviation_in_log_domain() {
        let a = HdrScalar::from_lambda_power(0.5, 5000);
        assert_eq!(log_deviation(a, a), 0.0);
        assert!((log_deviation(a, a.scale(1.001)) - 1e-3).abs() < 1e-9);
        assert_eq!(log_deviation(a, HdrScalar::ZERO), f64::INFINITY);
        assert_eq!(log_deviation(HdrScalar::ZERO, HdrScalar::ZERO), 0.0);
    }
}
