//! `simulate`: kernel gradient-descent loss trajectories as CSV.

use std::path::PathBuf;

use clap::Args as ClapArgs;

use neurokernel::dynamics::{gd_trajectory_matrix, masked_gd_trajectory, GramByDistance};
use neurokernel::kernel::phi_eval;
use neurokernel::rng::stream_rng;
use rand::seq::SliceRandom;

use super::maxlr::probe_target;
use super::KernelArgs;
use crate::output::{fmt, write_csv, CliError, CliResult};

const MAX_SIMULATE_DIM: usize = 14;

pub const HEADER: &str = "step,loss,train_loss,diverged";

#[derive(ClapArgs)]
pub struct Args {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Cube dimension (dense simulation; d <= 14).
    #[arg(long)]
    pub d: usize,
    /// Learning rate.
    #[arg(long)]
    pub alpha: f64,
    /// Number of GD steps.
    #[arg(long)]
    pub steps: usize,
    /// Train on a random subset of this size instead of the full cube.
    #[arg(long)]
    pub train_size: Option<usize>,
    /// Seed for the target function and the training subset.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> CliResult<()> {
    if args.d > MAX_SIMULATE_DIM {
        return Err(CliError::resource(format!(
            "simulate holds the dense 2^d state; d <= {MAX_SIMULATE_DIM}, got {}",
            args.d
        )));
    }
    let cfg = args.kernel.config();
    cfg.validate()?;
    let gram = GramByDistance::from_phi(|t| phi_eval(&cfg, t, 1.0, 1.0).unwrap(), args.d)?;
    let target = probe_target(args.d, args.seed)?;
    let records = match args.train_size {
        None => gd_trajectory_matrix(&gram, &target, args.alpha, args.steps)?,
        Some(m) => {
            let n = 1usize << args.d;
            if m == 0 || m > n {
                return Err(CliError::usage(format!(
                    "train size must be in 1..={n}, got {m}"
                )));
            }
            let mut points: Vec<u64> = (0..n as u64).collect();
            points.shuffle(&mut stream_rng(args.seed, u64::MAX));
            points.truncate(m);
            masked_gd_trajectory(&gram, &points, &target, args.alpha, args.steps)?
        }
    };
    let rows: Vec<String> = records
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{}",
                r.step,
                fmt(r.loss),
                r.train_loss.map(fmt).unwrap_or_default(),
                r.diverged
            )
        })
        .collect();
    write_csv(args.out.as_deref(), HEADER, &rows)
}
