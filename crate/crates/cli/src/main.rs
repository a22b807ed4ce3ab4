use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ssk_cli::{bench_corpus, bench_synthetic, crosscheck, selfcheck, BenchConfig, CorpusOptions, Perturbation};
use ssk_core::{encode_texts, normalize, Algorithm, KernelParams, TokenMode, DEFAULT_GAP_CAP};

#[derive(Parser)]
#[command(name = "ssk", version, about = "String subsequence kernels: compute, cross-check, benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every algorithm against the built-in worked examples.
    Selfcheck,
    /// Compute K_1..K_p for one pair of strings.
    Compute(ComputeArgs),
    /// Compare algorithms on random pairs.
    Crosscheck(CrosscheckArgs),
    /// Time algorithms over a grid of random pairs and write CSV.
    BenchSynthetic(SyntheticArgs),
    /// Time algorithms over pairs of documents in a directory and write CSV.
    BenchCorpus(CorpusArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Char,
    Word,
}

impl From<Mode> for TokenMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Char => TokenMode::Character,
            Mode::Word => TokenMode::Word,
        }
    }
}

#[derive(Args)]
struct ComputeArgs {
    /// First string (or a path with --files).
    s: String,
    /// Second string (or a path with --files).
    t: String,
    /// Read both inputs from files.
    #[arg(long)]
    files: bool,
    #[arg(short, long, default_value_t = 3)]
    p: usize,
    #[arg(short, long, default_value_t = 0.5)]
    lambda: f64,
    /// brute, dp, sparse, geometric, trie or trie:G.
    #[arg(short, long, default_value = "geometric")]
    algorithm: Algorithm,
    #[arg(long, value_enum, default_value = "char")]
    mode: Mode,
    /// Also print K_p(s,t) / sqrt(K_p(s,s) K_p(t,t)).
    #[arg(long)]
    normalized: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', default_value = "dp,sparse,geometric")]
    algorithms: Vec<Algorithm>,
    #[arg(short, long, default_value_t = 10)]
    p: usize,
    #[arg(short, long, default_value_t = 0.5)]
    lambda: f64,
    /// Gap cap for the trie algorithm.
    #[arg(long, default_value_t = DEFAULT_GAP_CAP)]
    g_max: usize,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
    #[arg(long, default_value_t = 3)]
    pairs: usize,
    /// Runs estimated to need more memory than this are recorded as oom.
    #[arg(long, default_value_t = 4096)]
    memory_limit_mb: usize,
    /// Skip the discarded warm-up run before each set of repetitions.
    #[arg(long)]
    no_warmup: bool,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GridArgs {
    fn config(&self, lengths: Vec<usize>, alphabet_sizes: Vec<usize>, seed: u64) -> BenchConfig {
        BenchConfig {
            algorithms: self.algorithms.clone(),
            lengths,
            alphabet_sizes,
            p: self.p,
            lambda: self.lambda,
            g_max: self.g_max,
            repetitions: self.repetitions,
            pairs: self.pairs,
            seed,
            memory_limit_bytes: self.memory_limit_mb << 20,
            warmup: !self.no_warmup,
        }
    }
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long, value_delimiter = ',', default_value = "brute,dp,sparse,geometric")]
    algorithms: Vec<Algorithm>,
    /// Upper bounds on string length; each string length is drawn from 0..=L.
    #[arg(long, value_delimiter = ',', default_value = "12")]
    lengths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,26")]
    alphabets: Vec<usize>,
    /// Pairs per (length, alphabet) cell.
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(short, long, default_value_t = 4)]
    p: usize,
    #[arg(short, long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_GAP_CAP)]
    g_max: usize,
    #[arg(long, default_value_t = ssk_cli::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale one level of one algorithm, ALGORITHM:LEVEL:FACTOR, to test the checker.
    #[arg(long, hide = true)]
    perturb: Option<Perturbation>,
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64,128,256,512,1024,2048,4096,8192")]
    lengths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64,128,256,512,1024,2048,4096,8192")]
    alphabets: Vec<usize>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of plain-text files.
    dir: PathBuf,
    #[arg(long, value_enum, default_value = "word")]
    mode: Mode,
    /// Subsequence lengths to time; defaults to --p.
    #[arg(long, value_delimiter = ',')]
    p_values: Vec<usize>,
    /// Recorded in the header; corpus pairing is deterministic.
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_input(text: &str, from_file: bool) -> Result<String> {
    if from_file {
        std::fs::read_to_string(Path::new(text)).with_context(|| format!("reading {text}"))
    } else {
        Ok(text.to_string())
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Selfcheck => {
            let outcomes = selfcheck();
            for o in &outcomes {
                let verdict = if o.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {} {}", o.name, o.detail);
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
        Command::Compute(args) => {
            let texts = [read_input(&args.s, args.files)?, read_input(&args.t, args.files)?];
            let (_, seqs) = encode_texts(&texts, args.mode.into());
            let params = KernelParams::new(args.p, args.lambda)?;
            let k = args.algorithm.compute(&seqs[0], &seqs[1], params)?;
            println!("q\tK_q\tln_K_q");
            for (q, v) in k.values().iter().enumerate() {
                println!("{}\t{v}\t{}", q + 1, v.ln());
            }
            if args.normalized {
                let k_ss = args.algorithm.compute(&seqs[0], &seqs[0], params)?.last();
                let k_tt = args.algorithm.compute(&seqs[1], &seqs[1], params)?.last();
                println!("normalized\t{}", normalize(k.last(), k_ss, k_tt)?);
            }
            Ok(true)
        }
        Command::Crosscheck(args) => {
            let config = BenchConfig {
                algorithms: args.algorithms,
                lengths: args.lengths,
                alphabet_sizes: args.alphabets,
                p: args.p,
                lambda: args.lambda,
                g_max: args.g_max,
                pairs: args.pairs,
                seed: args.seed,
                ..BenchConfig::default()
            };
            let report = crosscheck(&config, args.tolerance, args.perturb)?;
            for m in &report.mismatches {
                println!("FAIL {m}");
            }
            println!(
                "{} pairs, {} comparisons, {} skipped runs, max relative deviation {:.3e}: {}",
                report.pairs_checked,
                report.comparisons,
                report.skipped,
                report.max_deviation,
                if report.passed() { "PASS" } else { "FAIL" }
            );
            Ok(report.passed())
        }
        Command::BenchSynthetic(args) => {
            let config = args.grid.config(args.lengths, args.alphabets, args.seed);
            let summary = bench_synthetic(&config, output(&args.grid.out)?)?;
            eprintln!(
                "{} records, {} oom, {} skipped, {} errors",
                summary.records, summary.oom, summary.skipped, summary.errors
            );
            Ok(summary.errors == 0)
        }
        Command::BenchCorpus(args) => {
            let config = args.grid.config(vec![1], vec![1], args.seed);
            let options = CorpusOptions {
                mode: args.mode.into(),
                p_values: if args.p_values.is_empty() {
                    vec![args.grid.p]
                } else {
                    args.p_values
                },
            };
            let summary = bench_corpus(&args.dir, &config, &options, output(&args.grid.out)?)?;
            eprintln!(
                "{} records, {} unreadable files, {} errors",
                summary.records, summary.warnings, summary.errors
            );
            Ok(summary.errors == 0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
