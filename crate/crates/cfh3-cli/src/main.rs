//! Command-line front end: schedule builds, structural validation, and
//! exact diagnostics, emitting deterministic CSV/JSON artifacts.

mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cfh3::{Error, ScheduleKind};

use commands::CommonArgs;
use emit::Format;

const LONG_ABOUT: &str = "\
Exact cut-and-stack constructions of measure-preserving actions of the
3-dimensional Heisenberg group: schedule builders, structural validation,
and correlation/asymmetry/rigidity/tiling diagnostics. Every numeric
artifact column carries the exact rational alongside a 12-significant-digit
decimal, and all outputs are byte-identical across runs with the same
configuration and seed.

Exit codes:
  0  success
  1  input/output failure
  2  invalid configuration or usage
  3  generation failed within its retry budget
  4  partition budget exceeded
  5  level-capacity overflow
  6  shear mismatch between regions
  7  validation or verification failure";

/// Exact constructions and diagnostics on the 3-dimensional Heisenberg
/// group.
#[derive(Parser)]
#[command(name = "cfh3", version, about, long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags every command accepts.
#[derive(Args)]
struct CommonFlags {
    /// Configuration file (JSON or TOML; schema is command-specific,
    /// unknown keys are rejected)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory artifacts are written into
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Seed override for stochastic constructions
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for commands that parallelize (values are
    /// identical for any thread count)
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl CommonFlags {
    fn into_common(self) -> CommonArgs {
        CommonArgs {
            config: self.config,
            out: self.out,
            seed: self.seed,
            jobs: self.jobs,
            format: self.format,
        }
    }
}

/// Construction selector of the `build` command.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    /// Finite measure, stochastically equidistributed spacers.
    Mixing,
    /// Infinite measure, central arithmetic-progression spacers.
    Infinite,
    /// Finite measure, period-5 cumulative central spacers.
    Asymmetric,
}

impl From<KindArg> for ScheduleKind {
    fn from(kind: KindArg) -> ScheduleKind {
        match kind {
            KindArg::Mixing => ScheduleKind::Mixing,
            KindArg::Infinite => ScheduleKind::Infinite,
            KindArg::Asymmetric => ScheduleKind::Asymmetric,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a schedule and write it with its construction report
    Build {
        #[command(flatten)]
        common: CommonFlags,
        /// Which construction to run (required unless --config names one)
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Number of construction steps
        #[arg(long, value_name = "N")]
        levels: Option<usize>,
        /// Round every new third half-width up to an integer
        #[arg(long)]
        gamma_integer: bool,
    },
    /// Check every structural condition of a schedule artifact
    Validate {
        #[command(flatten)]
        common: CommonFlags,
        /// Schedule artifact to check
        #[arg(long, value_name = "PATH")]
        schedule: Option<PathBuf>,
    },
    /// Exact correlation-decay table along one subgroup
    Correlate {
        #[command(flatten)]
        common: CommonFlags,
        /// Schedule artifact to analyze (default: a fresh default build)
        #[arg(long, value_name = "PATH")]
        schedule: Option<PathBuf>,
    },
    /// Period-5 asymmetry ledgers at central-orbit steps
    Asymmetry {
        #[command(flatten)]
        common: CommonFlags,
        /// Schedule artifact to analyze (default: a fresh default build)
        #[arg(long, value_name = "PATH")]
        schedule: Option<PathBuf>,
    },
    /// Symmetric-difference brackets along period-5 return translates
    Rigidity {
        #[command(flatten)]
        common: CommonFlags,
        /// Schedule artifact to analyze (default: a fresh default build)
        #[arg(long, value_name = "PATH")]
        schedule: Option<PathBuf>,
    },
    /// Exact lattice-tiling verification over a finite window
    Tiling {
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Exact translation ratios for a family of boxes
    Folner {
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Representation evaluation and descriptor-transform battery
    Spectral {
        #[command(flatten)]
        common: CommonFlags,
    },
}

/// Maps every error class to its documented exit code.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::GammaZero | Error::Serde(_) => 2,
        Error::GenerationFailed { .. } => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::Overflow { .. } => 5,
        Error::ShearMismatch { .. } => 6,
        Error::Validation(_) | Error::HashMismatch { .. } => 7,
        Error::Io(_) => 1,
    }
}

fn run(cli: Cli) -> cfh3::Result<i32> {
    match cli.command {
        Command::Build {
            common,
            kind,
            levels,
            gamma_integer,
        } => commands::cmd_build(
            &common.into_common(),
            kind.map(ScheduleKind::from),
            levels,
            gamma_integer,
        ),
        Command::Validate { common, schedule } => {
            commands::cmd_validate(&common.into_common(), schedule.as_deref())
        }
        Command::Correlate { common, schedule } => {
            commands::cmd_correlate(&common.into_common(), schedule.as_deref())
        }
        Command::Asymmetry { common, schedule } => {
            commands::cmd_asymmetry(&common.into_common(), schedule.as_deref())
        }
        Command::Rigidity { common, schedule } => {
            commands::cmd_rigidity(&common.into_common(), schedule.as_deref())
        }
        Command::Tiling { common } => commands::cmd_tiling(&common.into_common()),
        Command::Folner { common } => commands::cmd_folner(&common.into_common()),
        Command::Spectral { common } => commands::cmd_spectral(&common.into_common()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error[exit {code}]: {e}");
            ExitCode::from(code)
        }
    }
}
