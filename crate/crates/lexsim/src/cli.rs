//! Argument parsing and dispatch for the `lexsim` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, Model};
use crate::error::{HarnessError, Result};
use crate::run::{run, write_outputs};
use crate::sweep::{load_sweep, sweep};

#[derive(Debug, Parser)]
#[command(
    name = "lexsim",
    version,
    about = "Simulations of litigation, settlement and the evolution of legal rules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Contract completeness before and after a cost shock.
    Equilibrium(RunArgs),
    /// Settlement ranges and outcomes under fee rules.
    Settle(RunArgs),
    /// The frivolous-suit game.
    Frivolous(RunArgs),
    /// Evolution of a population of legal rules.
    Evolve(RunArgs),
    /// Caseload composition under a flat cost reduction.
    Composition(RunArgs),
    /// Cartesian parameter sweep over any of the above.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path. Defaults to the config's `output_path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG chart here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Equilibrium(a)
            | Command::Settle(a)
            | Command::Frivolous(a)
            | Command::Evolve(a)
            | Command::Composition(a)
            | Command::Sweep(a) => a,
        }
    }

    fn model(&self) -> Option<Model> {
        match self {
            Command::Equilibrium(_) => Some(Model::Equilibrium),
            Command::Settle(_) => Some(Model::Settle),
            Command::Frivolous(_) => Some(Model::Frivolous),
            Command::Evolve(_) => Some(Model::Evolve),
            Command::Composition(_) => Some(Model::Composition),
            Command::Sweep(_) => None,
        }
    }
}

fn out_path(args: &RunArgs, fallback: Option<&PathBuf>) -> Result<PathBuf> {
    args.out
        .clone()
        .or_else(|| fallback.cloned())
        .ok_or_else(|| {
            HarnessError::Validation(vec![crate::Violation {
                path: "output_path".into(),
                message: "no --out flag and no output_path in the config".into(),
            }])
        })
}

/// Runs a parsed command. Progress notes go to `log`.
pub fn dispatch(command: &Command, log: &mut dyn FnMut(&str)) -> Result<()> {
    let args = command.args();
    match command.model() {
        Some(model) => {
            let mut config = load_config(&args.config)?;
            if config.model != model {
                return Err(HarnessError::Validation(vec![crate::Violation {
                    path: "model".into(),
                    message: format!(
                        "config is for {}, not {}",
                        config.model.as_str(),
                        model.as_str()
                    ),
                }]));
            }
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let out = out_path(args, config.output_path.as_ref())?;
            run(&config, &out, args.svg.as_deref())?;
        }
        None => {
            let mut spec = load_sweep(&args.config)?;
            if let Some(seed) = args.seed {
                spec.base.seed = seed;
            }
            let out = out_path(args, spec.base.output_path.as_ref())?;
            log(&format!(
                "sweep: {} points x {} replicates = {} runs",
                spec.points(),
                spec.replicates,
                spec.size()
            ));
            let result = sweep(&spec)?;
            let svg_text = args.svg.as_ref().map(|_| result.chart.render());
            write_outputs(
                &out,
                &result.table.to_csv(),
                args.svg.as_deref().zip(svg_text.as_deref()),
            )?;
        }
    }
    Ok(())
}
