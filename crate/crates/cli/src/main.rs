//! Command-line front end: generate, stats, eval, validate and play.

mod play;
mod report;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use diffgame::config::RunConfig;
use diffgame::pipeline::{self, Orientation};
use diffgame::World;

#[derive(Parser)]
#[command(name = "diffgame", version, about = "Spot-the-difference dialog dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate scene pairs and self-play dialogs.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Answerer noise during generation.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Number of image pairs.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Print corpus statistics of a generated dataset.
    Stats {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Score an answerer that lies with probability `epsilon`.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a config file, a dataset directory, or both.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Play the questioner against the oracle answerer.
    Play {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Play from the edited scene instead of the original.
        #[arg(long)]
        reverse: bool,
        /// Show the tracker's confirmed and unconfirmed nodes each round.
        #[arg(long)]
        debug: bool,
    },
}

/// Bad input configuration; exits with status 2.
#[derive(Debug)]
struct ConfigFailure(String);

impl std::fmt::Display for ConfigFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigFailure {}

fn config_error(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigFailure(e.to_string()).into()
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).map_err(config_error),
        None => Ok(RunConfig::default()),
    }
}

fn load_world(config: &RunConfig) -> Result<World> {
    match &config.data_dir {
        Some(dir) => World::from_dir(dir).map_err(config_error),
        None => Ok(World::builtin()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    match cli.command {
        Command::Generate { config, seed, workers, out, epsilon, pairs } => {
            let mut cfg = load_config(config.as_ref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = Some(w);
            }
            if let Some(o) = out {
                cfg.out = o;
            }
            if let Some(e) = epsilon {
                cfg.epsilon = e;
            }
            if let Some(n) = pairs {
                cfg.pairs = n;
            }
            cfg.validate().map_err(config_error)?;
            let world = load_world(&cfg)?;
            let dataset = pipeline::generate_dataset(&world, &cfg).context("generation aborted")?;
            pipeline::write_dataset(&dataset, &cfg.out).context("writing dataset")?;
            report::manifest(&mut stdout.lock(), &dataset.manifest, &cfg.out)?;
        }
        Command::Stats { dataset, json } => {
            let data = pipeline::load_dataset(&dataset).context("loading dataset")?;
            let stats = pipeline::compute_stats(&data.dialogs)?;
            if json {
                report::json(&mut stdout.lock(), &stats)?;
            } else {
                report::stats(&mut stdout.lock(), &stats)?;
            }
        }
        Command::Eval { dataset, epsilon, seed, json } => {
            if !(0.0..=1.0).contains(&epsilon) {
                return Err(config_error(format!("invalid value for `epsilon`: {epsilon} is not in [0, 1]")));
            }
            let data = pipeline::load_dataset(&dataset).context("loading dataset")?;
            let world = load_world(&data.manifest.config)?;
            let metrics = diffgame::eval::evaluate(&world, &data, epsilon, seed)?;
            if json {
                report::json(&mut stdout.lock(), &metrics)?;
            } else {
                report::metrics(&mut stdout.lock(), &metrics)?;
            }
        }
        Command::Validate { config, dataset } => {
            if config.is_none() && dataset.is_none() {
                return Err(config_error("nothing to validate: pass --config or --dataset"));
            }
            if let Some(path) = &config {
                let cfg = load_config(Some(path))?;
                load_world(&cfg)?;
                println!("{}: ok", path.display());
            }
            if let Some(dir) = &dataset {
                let data = pipeline::load_dataset(dir).context("loading dataset")?;
                let problems = pipeline::validate_dataset(&data);
                if !problems.is_empty() {
                    for p in &problems {
                        eprintln!("{p}");
                    }
                    anyhow::bail!("{}: {} problem(s)", dir.display(), problems.len());
                }
                println!("{}: ok ({} pairs, {} dialogs)", dir.display(), data.pairs.len(), data.dialogs.len());
            }
        }
        Command::Play { seed, reverse, debug } => {
            let world = World::builtin();
            let orientation = if reverse { Orientation::Reverse } else { Orientation::Forward };
            let stdin = io::stdin();
            play::play(&world, seed, orientation, debug, &mut stdin.lock(), &mut stdout.lock())?;
        }
    }
    Ok(())
}

/// A closed downstream pipe (`diffgame stats | head`) is not our failure.
fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<ConfigFailure>()) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
