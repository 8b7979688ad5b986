//! Command-line front end: `radnav mission | roc | map-fixed`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use radnav::harness::{cmd_map_fixed, cmd_mission, cmd_roc, RocOptions, ScenarioSource};
use radnav::radar::ScanNoise;

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "radnav",
    version,
    about = "UAV radar mapping and target detection simulator"
)]
struct Cli {
    /// Only log warnings and errors.
    #[arg(long, global = true, env = "RADNAV_QUIET")]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file. Defaults to the built-in reference room.
    #[arg(long, env = "RADNAV_SCENARIO")]
    scenario: Option<PathBuf>,

    /// Array size of the built-in room when no scenario file is given (16 or 100).
    #[arg(long, env = "RADNAV_ELEMENTS", default_value_t = 100)]
    elements: usize,

    #[arg(long, env = "RADNAV_SEED", default_value_t = 0)]
    seed: u64,

    /// Output directory; created if missing.
    #[arg(long, env = "RADNAV_OUT")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Noise {
    Gaussian,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Run one planned search-and-mapping mission.
    Mission(Common),
    /// Monte-Carlo ROC of the target detector.
    Roc {
        #[command(flatten)]
        common: Common,
        /// Trials per hypothesis; overrides the scenario.
        #[arg(long, env = "RADNAV_TRIALS")]
        trials: Option<usize>,
        /// Worker threads.
        #[arg(long, env = "RADNAV_WORKERS", default_value_t = 1)]
        workers: usize,
    },
    /// Map along a named waypoint path without the planner.
    MapFixed {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "RADNAV_TRAJECTORY", default_value = "T3")]
        trajectory: String,
        #[arg(long, value_enum, default_value = "gaussian")]
        noise: Noise,
    },
}

fn source(c: &Common) -> radnav::Result<ScenarioSource> {
    match &c.scenario {
        Some(p) => ScenarioSource::from_path(p),
        None => ScenarioSource::builtin(c.elements),
    }
}

fn run(cli: Cli) -> radnav::Result<()> {
    let manifest = match cli.command {
        Command::Mission(c) => cmd_mission(&source(&c)?, c.seed, &c.out)?,
        Command::Roc {
            common,
            trials,
            workers,
        } => cmd_roc(
            &source(&common)?,
            common.seed,
            &common.out,
            RocOptions { trials, workers },
        )?,
        Command::MapFixed {
            common,
            trajectory,
            noise,
        } => {
            let noise = match noise {
                Noise::Gaussian => ScanNoise::Gaussian,
                Noise::Off => ScanNoise::Off,
            };
            cmd_map_fixed(
                &source(&common)?,
                &trajectory,
                common.seed,
                &common.out,
                noise,
            )?
        }
    };
    log::info!("wrote {} artifacts", manifest.artifacts.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            })
        }
    }
}
