//! `ensemble-gp` command-line front end: ingest transactions, evaluate and
//! tune ensemble-kernel GP forecasts, and emit CSV tables and SVG plots.

pub mod commands;
pub mod config;
pub mod svg;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{BoArgs, RunConfig, SharedArgs};

#[derive(Debug, Parser)]
#[command(name = "ensemble-gp", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate a transactions CSV into one series file per ATC category
    Ingest {
        #[command(flatten)]
        shared: SharedArgs,
    },
    /// Compare each base kernel and the ensemble on the test segment
    Evaluate {
        #[command(flatten)]
        shared: SharedArgs,
        #[command(flatten)]
        bo: BoArgs,
    },
    /// Tune ensemble weights with Bayesian optimization
    Optimize {
        #[command(flatten)]
        shared: SharedArgs,
        #[command(flatten)]
        bo: BoArgs,
    },
    /// Predict future periods with the ensemble fit on all points
    Forecast {
        #[command(flatten)]
        shared: SharedArgs,
        #[command(flatten)]
        bo: BoArgs,
        #[arg(long, value_name = "N")]
        horizon: Option<usize>,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { shared } => {
            commands::ingest(&RunConfig::resolve(&shared, &BoArgs::default())?)?;
        }
        Command::Evaluate { shared, bo } => {
            commands::evaluate(&RunConfig::resolve(&shared, &bo)?)?;
        }
        Command::Optimize { shared, bo } => {
            commands::optimize(&RunConfig::resolve(&shared, &bo)?)?;
        }
        Command::Forecast { shared, bo, horizon } => {
            let cfg = RunConfig::resolve(&shared, &bo)?;
            let horizon = horizon
                .or(cfg.horizon)
                .ok_or_else(|| anyhow::anyhow!("no horizon given (--horizon or `horizon` in the config)"))?;
            commands::forecast(&cfg, horizon)?;
        }
    }
    Ok(())
}
