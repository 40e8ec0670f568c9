use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use stateless_witness::bench::{self, BenchConfig, BenchRecord, OutputFormat};
use stateless_witness::sizing::Scheme;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Verkle,
    MerkleNaive,
    MerkleSnark,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Verkle => Scheme::Verkle,
            SchemeArg::MerkleNaive => Scheme::NaiveMerkle,
            SchemeArg::MerkleSnark => Scheme::SnarkMerkle,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

/// Sweeps tree sizes and records witness size, proving time and
/// verification time for one witness scheme.
///
/// Exit status is 0 for a full sweep, 2 if a budget cut the sweep short
/// and 1 on error.
#[derive(Debug, Parser)]
#[command(name = "witness-bench", version)]
struct Args {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Smallest tree is 2^MIN leaves.
    #[arg(long, default_value_t = bench::DEFAULT_MIN_LOG_LEAVES)]
    min_log_leaves: u32,
    /// Largest tree is at most 2^MAX leaves. Above 2^13 only even powers run.
    #[arg(long, default_value_t = bench::DEFAULT_MAX_LOG_LEAVES)]
    max_log_leaves: u32,
    /// Keys proven per tree; smaller trees prove every key.
    #[arg(long, default_value_t = bench::DEFAULT_KEYS)]
    keys: usize,
    #[arg(long, default_value_t = bench::DEFAULT_REPS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds one repetition may take before the sweep stops.
    #[arg(long, value_name = "SECS")]
    time_budget: Option<f64>,
    /// Largest modeled tree memory, in MiB, that will be attempted.
    #[arg(long, value_name = "MIB")]
    mem_budget: Option<u64>,
    /// Worker threads. Bare `--parallel` uses every available core;
    /// without the flag everything runs on one thread.
    #[arg(long, value_name = "THREADS", num_args = 0..=1, default_missing_value = "0")]
    parallel: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(args: &Args) -> Result<BenchConfig, String> {
    if args.min_log_leaves > args.max_log_leaves {
        return Err("--min-log-leaves exceeds --max-log-leaves".into());
    }
    let time_budget = match args.time_budget {
        Some(s) if !(s.is_finite() && s > 0.0) => return Err("--time-budget must be a positive number of seconds".into()),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let parallelism = match args.parallel {
        None => 1,
        Some(0) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        Some(n) => n,
    };
    Ok(BenchConfig {
        scheme: args.scheme.into(),
        leaf_counts: bench::default_schedule(args.min_log_leaves, args.max_log_leaves),
        keys: args.keys,
        reps: args.reps,
        seed: args.seed,
        time_budget,
        mem_budget: args.mem_budget.map(|m| m.saturating_mul(1 << 20)),
        parallelism,
    })
}

fn report(r: &BenchRecord) {
    eprintln!(
        "{} N={} keys={} reps={} status={:?} witness={}B prove={:.3}ms verify={:.3}ms",
        r.scheme,
        r.leaves,
        r.keys_proven,
        r.reps,
        r.status,
        r.witness_bytes_mean,
        r.prove_ns_mean as f64 / 1e6,
        r.verify_ns_mean as f64 / 1e6,
    );
}

fn write(records: &[BenchRecord], args: &Args) -> stateless_witness::Result<()> {
    let format = args.format.into();
    if let Some(path) = &args.out {
        return bench::emit(records, format, path);
    }
    let mut out = std::io::stdout().lock();
    match format {
        OutputFormat::Csv => bench::write_csv(records, &mut out)?,
        OutputFormat::Json => {
            bench::write_json(records, &mut out)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let records = match bench::run_with_progress(&config, report) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write(&records, &args) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if bench::is_truncated(&records) {
        eprintln!("sweep stopped early by a budget");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
