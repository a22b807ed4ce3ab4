use anyhow::{bail, Result};
use ssk_core::{Algorithm, KernelParams, DEFAULT_GAP_CAP};

/// Parameters shared by the cross-check and benchmark drivers.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub lengths: Vec<usize>,
    pub alphabet_sizes: Vec<usize>,
    pub p: usize,
    pub lambda: f64,
    /// Gap cap for the trie algorithm; overrides the cap inside `algorithms`.
    pub g_max: usize,
    pub repetitions: usize,
    pub pairs: usize,
    pub seed: u64,
    /// Cells whose estimated footprint exceeds this are recorded as `oom`.
    pub memory_limit_bytes: usize,
    pub warmup: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: vec![Algorithm::Dp, Algorithm::Sparse, Algorithm::Geometric],
            lengths: (1..=13).map(|k| 1 << k).collect(),
            alphabet_sizes: (1..=13).map(|k| 1 << k).collect(),
            p: 10,
            lambda: 0.5,
            g_max: DEFAULT_GAP_CAP,
            repetitions: 5,
            pairs: 3,
            seed: 0,
            memory_limit_bytes: 4 << 30,
            warmup: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            bail!("no algorithms selected");
        }
        if self.repetitions == 0 || self.pairs == 0 {
            bail!("repetitions and pairs must be at least 1");
        }
        if self.lengths.is_empty() || self.alphabet_sizes.is_empty() {
            bail!("lengths and alphabet sizes must be nonempty");
        }
        if self.lengths.contains(&0) || self.alphabet_sizes.contains(&0) {
            bail!("lengths and alphabet sizes must be positive");
        }
        self.params()?;
        Ok(())
    }

    pub fn params(&self) -> Result<KernelParams> {
        Ok(KernelParams::new(self.p, self.lambda)?)
    }

    /// The selected algorithms with the configured gap cap applied.
    pub fn resolved_algorithms(&self) -> Vec<Algorithm> {
        self.algorithms
            .iter()
            .map(|a| match a {
                Algorithm::Trie { .. } => Algorithm::Trie { g_max: self.g_max },
                other => *other,
            })
            .collect()
    }
}
