use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use forel_cli::{commands, CliError, Format};

#[derive(Parser)]
#[command(name = "forel", version, about = "Follow-the-regularized-leader dynamics in games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Encoding of tables and reports.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the dynamics and write trajectory.csv and diagnostics.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Seed for random initial conditions; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute diagnostics from a trajectory written by `simulate`.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// trajectory.csv to analyze.
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Value, maximal-support equilibrium and essential actions of a game.
    Equilibrium {
        /// Game file, or an experiment config naming one.
        #[arg(long)]
        config: PathBuf,
        /// Write equilibrium.{json,csv} here instead of printing JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run every (regularizers, seed) pair of the config's `sweep` grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Replace the seed list by consecutive seeds starting here.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { common, seed } => {
            let dir = commands::cmd_simulate(&common.config, common.out.as_deref(), seed, common.format)?;
            println!("{}", dir.display());
        }
        Command::Analyze { common, trajectory } => {
            let report = commands::cmd_analyze(&common.config, &trajectory, common.out.as_deref(), common.format)?;
            if common.out.is_none() {
                print_json(&report);
            }
        }
        Command::Equilibrium { config, out, format } => {
            let eq = commands::cmd_equilibrium(&config, out.as_deref(), format)?;
            if out.is_none() {
                print_json(&eq);
            }
        }
        Command::Sweep { common, seed } => {
            let dir = commands::cmd_sweep(&common.config, common.out.as_deref(), seed, common.format)?;
            println!("{}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FOREL_LOG", "error")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forel: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
