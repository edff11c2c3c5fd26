//! `qmeasure` command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input or failed validation, 2 size cap
//! exceeded, 3 internal assertion (including a failing `paper-check`).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::{Failure, Format};

#[derive(Debug, Parser)]
#[command(
    name = "qmeasure",
    version,
    about = "Exact finite quantum measure theory and co-events"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    format: Format,

    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    /// Theory JSON file.
    #[arg(long)]
    theory: PathBuf,

    /// Allow exhaustive enumeration beyond 16 histories.
    #[arg(long)]
    allow_large: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check positivity, normalization and hermiticity of a theory.
    Validate {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Report mu(Omega) != 1 as a warning only.
        #[arg(long)]
        relax_normalization: bool,
    },
    /// Measures, interference terms and the level of a theory.
    Measure {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Event (hex bitmask) whose measure to print; repeatable.
        #[arg(long = "event")]
        events: Vec<String>,
        /// Comma-separated disjoint events for I_k; repeatable.
        #[arg(long = "interference")]
        interference: Vec<String>,
        /// Print the level in the interference hierarchy.
        #[arg(long)]
        level: bool,
    },
    /// Primitive (eps-)preclusive multiplicative co-events.
    Primitives {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Preclusion level as "p/q"; 0 means exact preclusion.
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Partition predicates and the principle classical partition.
    Partition {
        #[command(flatten)]
        theory: TheoryArgs,
        #[command(subcommand)]
        action: PartitionAction,
    },
    /// Closed-form analytics for n tosses of a coin.
    Coin {
        #[arg(long)]
        n: usize,
        /// Probability of heads as "p/q".
        #[arg(long)]
        p: String,
        #[arg(long)]
        eps: String,
        #[command(subcommand)]
        action: CoinAction,
    },
    /// Probability measures on co-event sets.
    Feasibility {
        #[command(flatten)]
        theory: TheoryArgs,
        /// JSON array of co-events.
        #[arg(long, conflicts_with = "all_duals")]
        coevents: Option<PathBuf>,
        /// Use every multiplicative co-event.
        #[arg(long)]
        all_duals: bool,
        #[arg(long, value_enum, default_value_t = Mode::All)]
        mode: Mode,
        /// Observable event for `--mode observable`; repeatable.
        #[arg(long = "observable")]
        observables: Vec<String>,
        #[command(subcommand)]
        action: FeasibilityAction,
    },
    /// Simulate coin sequences and run the one-tailed test.
    Hypothesis {
        #[arg(long)]
        n: usize,
        /// Hypothesised probability of heads.
        #[arg(long)]
        p0: String,
        #[arg(long)]
        eps: String,
        /// Probability used for simulation (default: p0).
        #[arg(long)]
        p_true: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of simulated sequences, seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Test this sequence (e.g. "hth...") instead of simulating.
        #[arg(long, conflicts_with_all = ["runs", "p_true"])]
        sequence: Option<String>,
    },
    /// Reproduce every worked example and report pass or fail.
    PaperCheck {
        /// Simulated sequences for the calibration check.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Random theories per property suite.
        #[arg(long, default_value_t = 100)]
        theories: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a single check by number.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Debug, Subcommand)]
enum PartitionAction {
    /// D(X, Y) = 0 for distinct blocks.
    Decoherence {
        /// Partition as a JSON array of hex blocks, inline or a file path.
        #[arg(long)]
        partition: String,
    },
    /// Preclusive separability.
    Separability {
        #[arg(long)]
        partition: String,
    },
    /// Every primitive co-event is classical on the partition.
    Classical {
        #[arg(long)]
        partition: String,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// The finest partition classical with respect to the primitives.
    Principle {
        #[arg(long, default_value = "0")]
        eps: String,
    },
}

#[derive(Debug, Subcommand)]
enum CoinAction {
    /// Greatest heads count whose lower tail is below eps.
    HEpsilon,
    /// P(L_H) for one heads count.
    Cumulative {
        #[arg(long)]
        heads: usize,
    },
    /// Size of the minimal straddling set (p = 1/2).
    Straddle,
    /// Least size of an event that is not eps-null (p = 1/2).
    PrimitiveSize,
    /// Whether the dual of a single history with `heads` heads is eps-preclusive.
    Singleton {
        #[arg(long)]
        heads: usize,
    },
    /// Even/odd incompatibility certificate (p = 1/2, even n).
    EvenOdd,
    /// Rows (H, P(N_H), P(L_H)).
    Tail,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    All,
    Observable,
    Binary,
}

#[derive(Debug, Subcommand)]
enum FeasibilityAction {
    /// Print the constraint rows.
    Build,
    /// Find a probability assignment or an infeasibility certificate.
    Solve,
    /// Largest probability of one co-event over the feasible assignments.
    Max {
        /// Dual (hex) of the co-event to maximise.
        #[arg(long)]
        coevent: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let format = cli.format;
    match commands::run(cli.command) {
        Ok(report) => match report.render(format) {
            Ok(text) => {
                print!("{text}");
                ExitCode::from(report.exit_code)
            }
            Err(failure) => report_failure(failure),
        },
        Err(failure) => report_failure(failure),
    }
}

fn report_failure(failure: Failure) -> ExitCode {
    eprintln!("error: {}", failure.message);
    ExitCode::from(failure.code)
}
