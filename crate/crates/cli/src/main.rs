//! `convextest`: run the convex position testers, generate instances and
//! query the exact oracles from the command line.
//!
//! Exit codes: 0 accept (or success), 1 reject, 2 usage, input or
//! constraint error. Results go to stdout as JSON, diagnostics to stderr.

mod commands;
mod pointfile;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convextest::generators::GenKind;
use convextest::BigRational;

#[derive(Debug, Parser)]
#[command(
    name = "convextest",
    version,
    about = "Property testers for convex position"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Base seed; batch run `i` uses `split_seed(seed, i)`.
    #[arg(long, env = "CONVEXTEST_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// Run this many independent seeds and print one JSON line per run.
    #[arg(long)]
    batch: Option<u64>,
    /// Upper bound on concurrently running batch runs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Far tester: rejects inputs that are far from convex position.
    TestFar {
        file: PathBuf,
        #[arg(long, value_parser = rational)]
        epsilon: BigRational,
        #[command(flatten)]
        seed: SeedArg,
        /// Repetitions of the sample-and-test step.
        #[arg(long, default_value_t = convextest::tester::DEFAULT_REPETITIONS)]
        reps: u32,
        /// Run the repetitions of one run concurrently.
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Close tester: accepts inputs close to convex position with a convex
    /// subset as certificate.
    TestClose {
        file: PathBuf,
        #[arg(long, value_parser = rational)]
        epsilon: BigRational,
        #[arg(long, value_parser = rational, default_value = "0.1")]
        delta: BigRational,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Write a generated point set.
    Gen {
        #[arg(value_parser = gen_kind)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Closeness target for `convex-plus-interior`.
        #[arg(long, value_parser = rational)]
        epsilon: Option<BigRational>,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the set here and print a JSON summary instead of the set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact answers for small inputs.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: OracleMode,
        /// Restrict to these comma-separated ids; reported ids refer to the
        /// whole file.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Bound factors and a Monte Carlo estimate for the sampling lemma.
    VerifyLemma3 {
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        ell: usize,
        /// Sample size; defaults to the certified ceiling of `s0`.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        seed: SeedArg,
        /// Skip the parameter constraints.
        #[arg(long)]
        unconstrained: bool,
        /// Report the sample-size counterexample at n = 256, k = ell = 8.
        #[arg(long, conflicts_with_all = ["n", "k", "ell", "s", "trials", "unconstrained"])]
        appendix: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    /// Convex position test with a witness.
    Convex,
    /// Fewest points whose removal leaves a convex set.
    MinRemoval,
    /// Largest subset in convex position (planar).
    #[value(name = "max-subset-2d")]
    MaxSubset2d,
}

fn rational(s: &str) -> Result<BigRational, String> {
    pointfile::parse_rational(s)
}

fn gen_kind(s: &str) -> Result<GenKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
