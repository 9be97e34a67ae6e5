//! Subcommand implementations and the argument types they share.

pub mod census;
pub mod maxlr;
pub mod reconstruct;
pub mod simulate;
pub mod spectrum;
pub mod sweep;

use clap::{Args as ClapArgs, ValueEnum};

use neurokernel::boolcube::{cube_spectrum_config, fractional_variance};
use neurokernel::gaussian::{chi_sq_rule, gaussian_spectrum};
use neurokernel::kernel::phi_eval;
use neurokernel::sphere::{gegenbauer_at_one, harmonic_weight, sphere_spectrum_quadrature};
use neurokernel::{Activation, KernelConfig, KernelKind, Result};

use crate::output::fmt;

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Ck,
    Ntk,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ActArg {
    Relu,
    Erf,
}

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum DistArg {
    Cube,
    Sphere,
    Gaussian,
}

impl DistArg {
    pub fn name(self) -> &'static str {
        match self {
            DistArg::Cube => "cube",
            DistArg::Sphere => "sphere",
            DistArg::Gaussian => "gaussian",
        }
    }
}

/// The kernel-selecting flags shared by most subcommands.
#[derive(ClapArgs)]
pub struct KernelArgs {
    /// Kernel kind: conjugate kernel or neural tangent kernel.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Activation function of the MLP.
    #[arg(long, value_enum)]
    pub act: ActArg,
    /// Network depth (number of layer-map applications; depth 1 is affine).
    #[arg(long)]
    pub depth: usize,
    /// Weight variance σ_w².
    #[arg(long)]
    pub sigw2: f64,
    /// Bias variance σ_b².
    #[arg(long)]
    pub sigb2: f64,
}

impl KernelArgs {
    pub fn config(&self) -> KernelConfig {
        build_config(self.kind, self.act, self.depth, self.sigw2, self.sigb2)
    }
}

pub fn build_config(
    kind: KindArg,
    act: ActArg,
    depth: usize,
    sigw2: f64,
    sigb2: f64,
) -> KernelConfig {
    KernelConfig {
        depth,
        activation: match act {
            ActArg::Relu => Activation::Relu,
            ActArg::Erf => Activation::Erf,
        },
        weight_var: sigw2,
        bias_var: sigb2,
        kind: match kind {
            KindArg::Ck => KernelKind::Ck,
            KindArg::Ntk => KernelKind::Ntk,
        },
    }
}

pub fn kind_name(k: KernelKind) -> &'static str {
    match k {
        KernelKind::Ck => "ck",
        KernelKind::Ntk => "ntk",
    }
}

pub fn act_name(a: Activation) -> &'static str {
    match a {
        Activation::Relu => "relu",
        Activation::Erf => "erf",
        Activation::Exp { .. } => "exp",
    }
}

pub const SPECTRUM_HEADER: &str =
    "distribution,kind,activation,depth,sigw2,sigb2,d,degree,eigenvalue,fractional_variance";

/// Eigenvalue/fractional-variance CSV rows of one kernel configuration
/// over one distribution, degrees 0..=degree_max (capped at d on the cube).
pub fn spectrum_rows(
    dist: DistArg,
    cfg: &KernelConfig,
    d: usize,
    degree_max: usize,
) -> Result<Vec<String>> {
    cfg.validate()?;
    let prefix = |degree: usize, eig: f64, fv: f64| {
        format!(
            "{},{},{},{},{},{},{d},{degree},{},{}",
            dist.name(),
            kind_name(cfg.kind),
            act_name(cfg.activation),
            cfg.depth,
            fmt(cfg.weight_var),
            fmt(cfg.bias_var),
            fmt(eig),
            fmt(fv)
        )
    };
    match dist {
        DistArg::Cube => {
            let s = cube_spectrum_config(cfg, d)?;
            let fv = fractional_variance(&s)?;
            Ok((0..=degree_max.min(d)).map(|k| prefix(k, s.mu[k], fv[k])).collect())
        }
        DistArg::Sphere => {
            let s =
                sphere_spectrum_quadrature(|t| phi_eval(cfg, t, 1.0, 1.0).unwrap(), d, degree_max, None)?;
            let total = phi_eval(cfg, 1.0, 1.0, 1.0)?;
            (0..=degree_max)
                .map(|l| {
                    let dim = gegenbauer_at_one(d, l)? / harmonic_weight(d, l);
                    Ok(prefix(l, s.a[l], dim * s.a[l] / total))
                })
                .collect()
        }
        DistArg::Gaussian => {
            let s = gaussian_spectrum(cfg, d, degree_max)?;
            // total variance E_q Φ(1, q, q) over the radial distribution
            let rule = chi_sq_rule(d, 40)?;
            let mut total = 0.0;
            for (q, w) in rule.nodes.iter().zip(&rule.weights) {
                total += w * phi_eval(cfg, 1.0, *q, *q)?;
            }
            (0..=degree_max)
                .map(|l| {
                    let dim = gegenbauer_at_one(d, l)? / harmonic_weight(d, l);
                    Ok(prefix(l, s.a[l], dim * s.a[l] / total))
                })
                .collect()
        }
    }
}
