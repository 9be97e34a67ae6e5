//! `spectrum`: eigenvalues of one kernel configuration as CSV.

use std::path::PathBuf;

use clap::Args as ClapArgs;

use super::{spectrum_rows, DistArg, KernelArgs, SPECTRUM_HEADER};
use crate::output::{write_csv, CliResult};

#[derive(ClapArgs)]
pub struct Args {
    /// Input distribution to diagonalize over.
    #[arg(long, value_enum)]
    pub dist: DistArg,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Input dimension.
    #[arg(long)]
    pub d: usize,
    /// Largest degree to report (capped at d on the cube).
    #[arg(long)]
    pub kmax: usize,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> CliResult<()> {
    let cfg = args.kernel.config();
    let rows = spectrum_rows(args.dist, &cfg, args.d, args.kmax)?;
    write_csv(args.out.as_deref(), SPECTRUM_HEADER, &rows)
}
