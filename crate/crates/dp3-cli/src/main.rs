//! `dp3` — integrate the positive odd solution of a degenerate Painlevé III
//! equation, accumulate its two associated integrals, and compare against
//! their closed-form large-τ behaviour. Figures 1-7 presets reproduce the
//! standard plots for the steep (a = −8) and shallow (a = −1/8) wells.

mod plot;
mod run;
mod table;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "dp3", version, about = "Painlevé III special-solution toolkit", long_about = None)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the solution and write tau,u,du tables/plots
    Solve(run::SolveArgs),
    /// Compare numeric integrals (or u) against their closed forms
    Compare(run::CompareArgs),
    /// Reproduce one of the preset figures 1-7 (or --all)
    Figure(run::FigureArgs),
    /// Run the built-in consistency checks and report pass/fail
    Selftest(run::SelftestArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Solve(args) => run::cmd_solve(args),
        Command::Compare(args) => run::cmd_compare(args),
        Command::Figure(args) => run::cmd_figure(args),
        Command::Selftest(args) => run::cmd_selftest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
