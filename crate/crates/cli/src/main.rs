//! `ffv`: generate instances, run theorem suites, explain checks.
//!
//! Exit codes: 0 when no check fails, 1 when some check fails, 2 on usage or
//! I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffv_core::instance::{generate, Instance, InstanceSpec, SymbolMode};
use ffv_core::numerics::ToleranceConfig;
use ffv_core::suite::{explain, run_suite_on_instance, run_suite_random, Suite, SuiteOptions, VerificationReport};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "ffv", version, about = "Fusion frame duality and (m,R)-multiplier verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a deterministic random instance to a JSON file.
    Gen(GenArgs),
    /// Run a theorem suite on an instance file or on random instances.
    Check(CheckArgs),
    /// Print the statement, anchor and tolerance of a check.
    Explain {
        /// Check name, e.g. parsa1257.
        check: String,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Ambient dimension n.
    #[arg(long = "dim")]
    dim: usize,
    /// Number of blocks.
    #[arg(long)]
    blocks: usize,
    /// Comma-separated subspace dimensions, one per block.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// identity, random_C_holding, random_C_failing or adversarial.
    #[arg(long, value_parser = parse_mode)]
    symbol: SymbolMode,
    #[arg(long)]
    seed: u64,
    /// Weight range lo,hi.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0.5,2")]
    weights: Vec<f64>,
    /// Store local frames with this many extra vectors per block.
    #[arg(long)]
    local_redundancy: Option<usize>,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// duals, multipliers, local, schatten or all.
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    /// Instance file written by `ffv gen`.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    file: Option<PathBuf>,
    /// Number of random instances.
    #[arg(long, requires = "seed")]
    random: Option<usize>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    tol_eq: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Add the [ar]/[msh] singularity contrast check.
    #[arg(long)]
    compare_ar: bool,
}

fn parse_mode(s: &str) -> Result<SymbolMode, String> {
    s.parse().map_err(|e: ffv_core::Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: ffv_core::Error| e.to_string())
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn run_gen(args: GenArgs) -> ExitCode {
    let [lo, hi] = match args.weights[..] {
        [lo, hi] => [lo, hi],
        _ => return usage("--weights takes exactly two values lo,hi"),
    };
    let mut spec = InstanceSpec::new(args.dim, args.dims, args.symbol, args.seed);
    if spec.blocks != args.blocks {
        return usage(format!("--blocks {} does not match {} dims", args.blocks, spec.blocks));
    }
    spec.weight_range = [lo, hi];
    spec.local_redundancy = args.local_redundancy;
    let inst = match generate(&spec) {
        Ok(inst) => inst,
        Err(e) => return usage(e),
    };
    match inst.save(&args.output) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => usage(e),
    }
}

fn emit(report: &VerificationReport, path: Option<&PathBuf>) -> ExitCode {
    let text = match report.to_json() {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                return usage(format!("{}: {e}", p.display()));
            }
        }
        None => print!("{text}"),
    }
    let s = report.summary;
    eprintln!("{}: {} pass, {} fail, {} indeterminate", report.suite, s.pass, s.fail, s.indeterminate);
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn run_check(args: CheckArgs) -> ExitCode {
    let defaults = ToleranceConfig::default();
    let tol = match ToleranceConfig::new(
        args.tol_rank.unwrap_or(defaults.rank_rel),
        args.tol_eq.unwrap_or(defaults.eq_rel),
        defaults.inv_rel,
    ) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let opts = SuiteOptions {
        tol,
        compare_ar: args.compare_ar,
    };
    let report = match (&args.file, args.random, args.seed) {
        (Some(path), None, _) => {
            let inst = match Instance::load(path) {
                Ok(i) => i,
                Err(e) => return usage(format!("{}: {e}", path.display())),
            };
            run_suite_on_instance(args.suite, &inst, &opts)
        }
        (None, Some(count), Some(seed)) => run_suite_random(args.suite, count, seed, &opts),
        _ => return usage("give either an instance file or --random COUNT --seed S"),
    };
    match report {
        Ok(r) => emit(&r, args.report.as_ref()),
        Err(e) => usage(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Check(args) => run_check(args),
        Command::Explain { check } => match explain(&check) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => usage(e),
        },
    }
}
