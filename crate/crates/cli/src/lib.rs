//! Cross-checking and benchmark harness for the kernels in `ssk-core`.

pub mod config;
pub mod corpus;
pub mod crosscheck;
pub mod record;
pub mod selfcheck;
pub mod synthetic;
pub mod workload;

pub use config::BenchConfig;
pub use corpus::{bench_corpus, inverse_match_frequency, CorpusOptions};
pub use crosscheck::{crosscheck, CrosscheckReport, Crosschecker, Mismatch, Perturbation, DEFAULT_TOLERANCE};
pub use record::{strip_columns, BenchRecord, Status, TIMING_COLUMNS};
pub use selfcheck::{selfcheck, CheckOutcome};
pub use synthetic::{bench_synthetic, timed_run, RunSummary};
pub use workload::{cell_rng, gen_random_pair, RNG_NAME};
