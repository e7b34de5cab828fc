//! `mega`: plan, explain and sweep over robot/human problem bundles.
//!
//! Exit status: 0 success, 1 unsolvable or infeasible, 2 input error,
//! 3 planner resource cap hit.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mega_core::strips::parse_rational;
use mega_core::Rational;

#[derive(Parser, Debug)]
#[command(
    name = "mega",
    version,
    about = "Human-aware planning: explicable plans versus explanations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text", env = "MEGA_FORMAT")]
    pub format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true, env = "MEGA_OUT")]
    pub out: Option<PathBuf>,
    /// Maximum planner expansions per call.
    #[arg(long, global = true, env = "MEGA_NODE_CAP", default_value_t = mega_core::planner::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    /// Wall-clock limit per planner call, in seconds.
    #[arg(long, global = true, env = "MEGA_TIME_CAP")]
    pub time_cap: Option<f64>,
    /// Generator seed.
    #[arg(long, global = true, env = "MEGA_SEED")]
    pub seed: Option<u64>,
    /// Allow explanations that correct action costs.
    #[arg(long, global = true, env = "MEGA_ALLOW_COST_EDITS")]
    pub allow_cost_edits: bool,
    /// Keep a popped node that ties the incumbent's objective from replacing it
    /// only when it is strictly better on penalty (default); with this flag
    /// any tie replaces the incumbent.
    #[arg(long, global = true, env = "MEGA_LATEST_WINS")]
    pub latest_wins: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    /// One JSON object per result.
    Record,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Robot,
    Human,
}

/// A weight: a rational such as `0.5` or `3/4`, or `delta` for the size of
/// the model difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alpha {
    Value(Rational),
    Delta,
}

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("delta") {
            return Ok(Alpha::Delta);
        }
        match parse_rational(s) {
            Some(value) if value >= Rational::from_integer(0) => Ok(Alpha::Value(value)),
            Some(_) => Err(format!("alpha must be non-negative, got `{s}`")),
            None => Err(format!("not a number: `{s}`")),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BundleArg {
    /// Bundle manifest, or a directory containing `bundle.toml`.
    #[arg(long, env = "MEGA_BUNDLE")]
    pub bundle: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal plan for one side's model.
    Plan {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, value_enum, default_value = "robot", env = "MEGA_SIDE")]
        side: Side,
    },
    /// Plan and explanation for one weight.
    Mega {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, default_value = "1", env = "MEGA_ALPHA")]
        alpha: Alpha,
        /// Also write every visited node as CSV.
        #[arg(long, env = "MEGA_LEDGER")]
        ledger: Option<PathBuf>,
    },
    /// One search, re-evaluated for several weights.
    Sweep {
        #[command(flatten)]
        bundle: BundleArg,
        /// Comma-separated weights.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, env = "MEGA_ALPHAS")]
        alphas: Vec<Alpha>,
        /// Fill the time column (left empty by default so output is reproducible).
        #[arg(long, env = "MEGA_TIMING")]
        timing: bool,
    },
    /// Smallest explanation that makes a robot-optimal plan optimal for the human.
    Mce {
        #[command(flatten)]
        bundle: BundleArg,
        /// Plan file; defaults to the robot's optimal plan.
        #[arg(long, env = "MEGA_PLAN")]
        plan: Option<PathBuf>,
    },
    /// Conditions that differ between the two models, as edits from human to robot.
    Diff {
        #[command(flatten)]
        bundle: BundleArg,
    },
    /// Check a plan's executability and cost in one side's model.
    Validate {
        #[command(flatten)]
        bundle: BundleArg,
        #[arg(long, env = "MEGA_PLAN")]
        plan: PathBuf,
        #[arg(long, value_enum, default_value = "robot", env = "MEGA_SIDE")]
        side: Side,
    },
    /// Write a generated bundle into `--out`.
    Generate {
        /// rover-martian, barman-bar, usar-grid, usar-demo or random.
        #[arg(long, env = "MEGA_FAMILY")]
        family: Option<String>,
        /// Scenario config (`key = value` lines); flags override it.
        #[arg(long, env = "MEGA_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long, env = "MEGA_DELTA_SIZE")]
        delta_size: Option<usize>,
        #[arg(long)]
        waypoints: Option<usize>,
        #[arg(long)]
        objectives: Option<usize>,
        #[arg(long)]
        ingredients: Option<usize>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        rubble: Option<usize>,
        #[arg(long)]
        collapsed: Option<usize>,
        #[arg(long)]
        fluents: Option<usize>,
        #[arg(long)]
        actions: Option<usize>,
    },
}

impl Global {
    pub fn planner(&self) -> mega_core::PlannerConfig {
        mega_core::PlannerConfig {
            node_cap: self.node_cap,
            time_cap: self.time_cap.map(Duration::from_secs_f64),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("mega: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
