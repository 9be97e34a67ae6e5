//! `reconstruct`: rebuild the kernel profile from its cube eigenvalues
//! and report the round-trip error at every grid distance. A mismatch
//! beyond tolerance is a numerical inconsistency (exit 3).

use std::path::PathBuf;

use clap::Args as ClapArgs;

use neurokernel::boolcube::{cube_spectrum_from_grid, reconstruct_phi, PhiGrid};
use neurokernel::kernel::phi_eval;
use neurokernel::Error;

use super::KernelArgs;
use crate::output::{fmt, write_csv, CliResult};

pub const HEADER: &str = "r,t,phi,reconstructed,abs_error";

const ROUND_TRIP_TOL: f64 = 1e-6;

#[derive(ClapArgs)]
pub struct Args {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Cube dimension.
    #[arg(long)]
    pub d: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> CliResult<()> {
    let cfg = args.kernel.config();
    cfg.validate()?;
    let grid = PhiGrid::sample(|t| phi_eval(&cfg, t, 1.0, 1.0).unwrap(), args.d)?;
    let s = cube_spectrum_from_grid(&grid, true)?;
    let mut rows = Vec::with_capacity(args.d + 1);
    for r in 0..=args.d {
        let t = (args.d as f64 - 2.0 * r as f64) / args.d as f64;
        let phi = grid.values[r];
        let rec = reconstruct_phi(&s, r)?;
        let err = (rec - phi).abs();
        if err > ROUND_TRIP_TOL * phi.abs().max(1e-12) {
            return Err(Error::NumericalInconsistency(format!(
                "reconstruction at distance {r} is {rec} but the grid holds {phi}"
            ))
            .into());
        }
        rows.push(format!("{r},{},{},{},{}", fmt(t), fmt(phi), fmt(rec), fmt(err)));
    }
    write_csv(args.out.as_deref(), HEADER, &rows)
}
