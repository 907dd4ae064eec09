//! `kari`: command-line front end for the Hilbert, tile, automaton,
//! entropy and free-group tooling.
//!
//! Exit status: 0 on success, 2 when a request is refused (budget, escaping
//! components, inadmissible input), 1 on malformed input or usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "kari", version, about = "Hilbert paths, Kari tiles and the path-XOR automaton")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Hilbert paths and the 12-tile substitution.
    #[command(subcommand)]
    Hilbert(HilbertCmd),
    /// Kari tiles, B_XY blocks and path tracing.
    #[command(subcommand)]
    Tiles(TilesCmd),
    /// The path-XOR cellular automaton.
    #[command(subcommand)]
    Ca(CaCmd),
    /// Word counting, entropy fits and Monte Carlo experiments.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Majority vote on the free group of rank two.
    #[command(subcommand)]
    Freegroup(FreegroupCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// `a` reads the blank-cross direction rule as printed, `b` uses the
/// mirror-consistent correction.
#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule6 {
    A,
    B,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyArg {
    Window,
    Torus,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GridInput {
    /// Grid or Configuration JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Override the topology stored in the input.
    #[arg(long, value_enum)]
    pub topology: Option<TopologyArg>,
    /// Choose the Kari direction-rule reading for `kari` inputs.
    #[arg(long, value_enum)]
    pub rule6_variant: Option<Rule6>,
}

#[derive(Debug, Args, Serialize)]
pub struct WindowArgs {
    /// Window size `WxH`.
    #[arg(long, default_value = "1x1")]
    pub window: String,
    /// Top-left cell `x,y` of the window.
    #[arg(long, default_value = "0,0")]
    pub origin: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HilbertCmd {
    /// Cells of a Hilbert path, as CSV (step,x,y) or JSON pairs.
    Path {
        #[arg(long, default_value = "a")]
        variant: String,
        #[arg(long)]
        level: i64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Iterated substitution of one alphabet tile, as Grid JSON.
    Substitute {
        /// Tile name such as `aWE` (variant, entry side, exit side).
        #[arg(long)]
        tile: String,
        #[arg(long, default_value_t = 1)]
        steps: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Unique preimage of a substitution block.
    Derive {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Square-filling check over every long sub-path.
    Lemma5 {
        #[arg(long, default_value = "a")]
        variant: String,
        /// Level of the path whose sub-paths are examined.
        #[arg(long, default_value_t = 4)]
        level: i64,
        /// Square side is `2^n`.
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The substitution alphabet with identifiers.
    Alphabet {
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TilesCmd {
    /// Tile catalog of a tile set.
    Enumerate {
        #[arg(long, default_value = "kari")]
        tileset: String,
        #[arg(long, value_enum)]
        rule6_variant: Option<Rule6>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Per-cell validity of a grid.
    Validate {
        #[command(flatten)]
        grid: GridInput,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The block B_XY(n) as Grid JSON.
    Bxy {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value = "NE")]
        orient: String,
        #[arg(long, default_value = "a")]
        label: String,
        /// Keep one ring of context so that edge cells validate.
        #[arg(long)]
        framed: bool,
        #[arg(long, value_enum)]
        rule6_variant: Option<Rule6>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Follow successors from a cell.
    Trace {
        #[command(flatten)]
        grid: GridInput,
        /// Start cell `x,y`.
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_length: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Connected path components of the valid cells.
    Components {
        #[command(flatten)]
        grid: GridInput,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaCmd {
    /// Apply the automaton; one JSON line per step.
    Step {
        #[command(flatten)]
        grid: GridInput,
        /// Group used when the input is a bare grid.
        #[arg(long, default_value = "Z2")]
        group: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// A configuration whose image matches the target on the window.
    Preimage {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long, default_value = "Z2")]
        group: String,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Space-time word of a window.
    Word {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long, default_value = "Z2")]
        group: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyCmd {
    /// Exact word counts for horizons 1..=T.
    Exact {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long, default_value = "Z2")]
        group: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        horizon: usize,
        /// Slicing modulus.
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u128,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sampled word counts for horizons 1..=T.
    Sampled {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long, default_value = "Z2")]
        group: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Least-squares slope of `value` against `horizon` from a CSV.
    Rate {
        /// CSV with columns horizon,value (header optional).
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Least period of the dynamics restricted to a window.
    Periodicity {
        #[command(flatten)]
        grid: GridInput,
        #[arg(long, default_value = "Z2")]
        group: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 4096)]
        bound: usize,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u128,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Plug-in measure entropy under the uniform Bernoulli measure.
    Measure {
        #[arg(long, default_value = "kari")]
        tileset: String,
        #[arg(long, value_enum)]
        rule6_variant: Option<Rule6>,
        #[arg(long, default_value = "Z2")]
        group: String,
        #[arg(long, default_value = "1x1")]
        window: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Probability that a long valid path starts in the central quarter.
    Survival {
        #[arg(long, default_value = "kari")]
        tileset: String,
        #[arg(long, value_enum)]
        rule6_variant: Option<Rule6>,
        /// Comma-separated window sides.
        #[arg(long, default_value = "16,32,64")]
        windows: String,
        /// Comma-separated path-length thresholds.
        #[arg(long, default_value = "8")]
        thresholds: String,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// The square-filling constants.
    Constants {
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventArg {
    All,
    Disagreement,
    Preimage,
    PairsExclusive,
    PairsBoth,
    PairsEither,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreegroupCmd {
    /// Exact probabilities of named events.
    Prob {
        #[arg(long, value_enum, default_value = "all")]
        event: EventArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// A radius r+1 pattern whose majority image matches the target.
    Preimage {
        /// BallPattern JSON.
        #[arg(long)]
        input: PathBuf,
        /// Match the target on the ball of this radius (default: all of it).
        #[arg(long)]
        window_radius: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("usage error: {e}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let refusal = e.downcast_ref::<kari_core::Error>().is_some_and(|e| e.is_refusal());
            if refusal {
                eprintln!("refused: {e:#}");
                ExitCode::from(2)
            } else {
                eprintln!("malformed input: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}
