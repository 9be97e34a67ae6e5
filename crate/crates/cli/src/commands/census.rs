//! `census`: Monte-Carlo histogram of sign-thresholded finite-width
//! networks, reported as a rank/probability curve.

use std::path::PathBuf;

use clap::Args as ClapArgs;

use neurokernel::netsample::{boolean_census, rank_curve, ArchConfig};
use neurokernel::Activation;

use super::ActArg;
use crate::output::{fmt, write_csv, CliError, CliResult};

pub const HEADER: &str = "rank,probability";

#[derive(ClapArgs)]
pub struct Args {
    /// Activation function.
    #[arg(long, value_enum)]
    pub act: ActArg,
    /// Weight variance σ_w².
    #[arg(long)]
    pub sigw2: f64,
    /// Bias variance σ_b².
    #[arg(long)]
    pub sigb2: f64,
    /// Input dimension (d <= 16).
    #[arg(long)]
    pub d: usize,
    /// Comma-separated hidden-layer widths, e.g. 40,40.
    #[arg(long, value_delimiter = ',')]
    pub widths: Vec<usize>,
    /// Number of networks to sample.
    #[arg(long)]
    pub samples: u64,
    /// Base seed; sample i uses seed base+i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> CliResult<()> {
    if args.widths.is_empty() {
        return Err(CliError::usage("need at least one hidden layer width"));
    }
    let arch = ArchConfig {
        input_dim: args.d,
        hidden_widths: args.widths.clone(),
        activation: match args.act {
            ActArg::Relu => Activation::Relu,
            ActArg::Erf => Activation::Erf,
        },
        weight_var: args.sigw2,
        bias_var: args.sigb2,
    };
    let h = boolean_census(&arch, args.samples, args.seed)?;
    let curve = rank_curve(&h)?;
    let rows: Vec<String> =
        curve.iter().map(|(rank, p)| format!("{rank},{}", fmt(*p))).collect();
    write_csv(args.out.as_deref(), HEADER, &rows)
}
