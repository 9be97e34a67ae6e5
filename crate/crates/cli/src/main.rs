//! Command-line front end for the neurokernel library: spectra of CK/NTK
//! kernels over the cube, sphere, and Gaussian, hyperparameter sweeps,
//! learning-rate prediction, kernel GD simulation, and the finite-width
//! census — all emitted as deterministic CSV (plus a JSON manifest for
//! sweeps).
//!
//! Exit codes: 0 ok, 2 usage/config error, 3 numerical inconsistency,
//! 4 resource limit exceeded.

mod commands;
mod output;

use clap::{Parser, Subcommand};

use commands::{census, maxlr, reconstruct, simulate, spectrum, sweep};

#[derive(Parser)]
#[command(
    name = "neurokernel",
    version,
    about = "Closed-form CK/NTK spectra of MLPs over the cube, sphere, and Gaussian"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and fractional variances of one kernel configuration.
    Spectrum(spectrum::Args),
    /// Grid sweep over hyperparameters, one CSV per distribution.
    Sweep(sweep::Args),
    /// Theoretical and empirical maximum learning rates.
    Maxlr(maxlr::Args),
    /// Kernel gradient-descent loss trajectory.
    Simulate(simulate::Args),
    /// Monte-Carlo census of sign-thresholded finite-width networks.
    Census(census::Args),
    /// Kernel reconstruction from cube eigenvalues, with error report.
    Reconstruct(reconstruct::Args),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(args) => spectrum::run(&args),
        Command::Sweep(args) => sweep::run(&args),
        Command::Maxlr(args) => maxlr::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Census(args) => census::run(&args),
        Command::Reconstruct(args) => reconstruct::run(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
