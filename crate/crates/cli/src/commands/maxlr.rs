//! `maxlr`: theoretical and empirically bisected maximum learning rates
//! of kernel GD over the boolean cube.

use std::path::PathBuf;

use clap::Args as ClapArgs;

use neurokernel::boolcube::cube_spectrum_config;
use neurokernel::dynamics::{empirical_max_lr, gd_trajectory_eigen, max_lr, CubeFunction, MaxLrMode};
use neurokernel::kernel::phi_eval;
use neurokernel::rng::{standard_normal, stream_rng};

use super::{act_name, kind_name, KernelArgs};
use crate::output::{fmt, write_csv, CliResult};

pub const HEADER: &str =
    "distribution,kind,activation,depth,sigw2,sigb2,d,theory_exact,theory_phi0,empirical";

#[derive(ClapArgs)]
pub struct Args {
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Cube dimension (dense simulation; d <= 20).
    #[arg(long)]
    pub d: usize,
    /// Number of network outputs (scales both thresholds).
    #[arg(long, default_value_t = 1)]
    pub n_outputs: usize,
    /// GD steps per divergence probe in the bisection.
    #[arg(long, default_value_t = 3000)]
    pub steps: usize,
    /// Seed for the random low-degree probe target.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A random target supported on degrees <= 3, so the top eigenvalue
/// max(mu_0, mu_1) is always excited.
pub fn probe_target(d: usize, seed: u64) -> neurokernel::Result<CubeFunction> {
    let coeffs: Vec<f64> = (0..1u64 << d)
        .map(|mask| {
            if mask.count_ones() <= 3 {
                standard_normal(&mut stream_rng(seed, mask))
            } else {
                0.0
            }
        })
        .collect();
    CubeFunction::from_fourier(d, coeffs)
}

pub fn run(args: &Args) -> CliResult<()> {
    let cfg = args.kernel.config();
    cfg.validate()?;
    let s = cube_spectrum_config(&cfg, args.d)?;
    let phi_zero = phi_eval(&cfg, 0.0, 1.0, 1.0)?;
    let theory_exact = max_lr(MaxLrMode::Exact, Some(&s), phi_zero, args.n_outputs)?;
    let theory_phi0 = max_lr(MaxLrMode::PhiZero, None, phi_zero, args.n_outputs)?;
    let target = probe_target(args.d, args.seed)?;
    let steps = args.steps;
    let n_outputs = args.n_outputs as f64;
    let diverges = |alpha: f64| {
        // single-output dynamics probed at the per-output rate alpha/n
        gd_trajectory_eigen(&s, &target, alpha / n_outputs, steps)
            .map(|r| r.last().map(|t| t.diverged).unwrap_or(false))
            .unwrap_or(true)
    };
    let empirical = empirical_max_lr(diverges, 3.0 * theory_exact, 0.002 * theory_exact)?;
    let row = format!(
        "cube,{},{},{},{},{},{},{},{},{}",
        kind_name(cfg.kind),
        act_name(cfg.activation),
        cfg.depth,
        fmt(cfg.weight_var),
        fmt(cfg.bias_var),
        args.d,
        fmt(theory_exact),
        fmt(theory_phi0),
        fmt(empirical)
    );
    write_csv(args.out.as_deref(), HEADER, &[row])
}
