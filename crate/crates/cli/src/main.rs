//! Batch front-end for the quantum-memristor reservoir simulator.
//!
//! Subcommands: `run` a benchmark end to end, `sweep-memory` over the decay
//! hyperparameter, reproduce the classical-baseline `table1`, export
//! `lagplot` pair columns, sweep a `tomo-grid` of reconstructed purities, and
//! search monomial hyperparameters with `hyperopt`. Every command with a
//! `--seed` is bit-reproducible: identical invocations write identical files.

use anyhow::Result;
use clap::{Parser, Subcommand};
use qmem_cli::commands;

#[derive(Parser)]
#[command(
    name = "qmem",
    version,
    about = "Quantum-memristor reservoir computing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark through the reservoir and readout.
    Run(commands::RunArgs),
    /// Sweep the memory decay and report MSE distributions per value.
    SweepMemory(commands::SweepArgs),
    /// Classical polynomial baselines vs the quantum model on the recurrence
    /// benchmark.
    Table1(commands::Table1Args),
    /// Export (x_t, x_{t+tau}) pair columns for truth, feedback and frozen
    /// predictions.
    Lagplot(commands::LagplotArgs),
    /// Reconstructed-purity sweep over the (input, reflectivity) plane.
    TomoGrid(commands::TomoArgs),
    /// Monomial-task hyperparameter search with the feedback/frozen
    /// comparison.
    Hyperopt(commands::HyperoptArgs),
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            commands::cmd_run(&args)?;
        }
        Command::SweepMemory(args) => {
            commands::cmd_sweep_memory(&args)?;
        }
        Command::Table1(args) => {
            commands::cmd_table1(&args)?;
        }
        Command::Lagplot(args) => {
            commands::cmd_lagplot(&args)?;
        }
        Command::TomoGrid(args) => {
            commands::cmd_tomo_grid(&args)?;
        }
        Command::Hyperopt(args) => {
            commands::cmd_hyperopt(&args)?;
        }
    }
    Ok(())
}
