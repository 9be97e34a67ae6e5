//! Finite-width Monte-Carlo census of random-MLP boolean functions.
//!
//! Random networks are drawn in the NTK parametrization
//! h^l(x) = (σ_w/√n^{l-1}) W^l φ(h^{l-1}(x)) + σ_b b^l with standard
//! normal W, b, evaluated over all of {±1}^d, sign-thresholded, and the
//! resulting boolean functions histogrammed. At large width the output
//! covariance across draws approaches the CK.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::Activation;
use crate::rng::{standard_normal, stream_rng};

const MAX_CENSUS_DIM: usize = 16;

/// A finite-width MLP architecture with scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchConfig {
    pub input_dim: usize,
    /// One entry per hidden layer; the output layer is scalar.
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
    pub weight_var: f64,
    pub bias_var: f64,
}

impl ArchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim < 1 {
            return Err(Error::InvalidInput("input_dim must be >= 1".into()));
        }
        if self.hidden_widths.iter().any(|w| *w < 1) {
            return Err(Error::InvalidInput("hidden widths must be >= 1".into()));
        }
        if !(self.weight_var >= 0.0) || !(self.bias_var >= 0.0) {
            return Err(Error::InvalidInput("variances must be nonnegative".into()));
        }
        self.activation.validate()
    }

    /// Layer dimensions from input to scalar output.
    fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_widths.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_widths);
        dims.push(1);
        dims
    }
}

fn apply_activation(act: Activation, x: f64) -> f64 {
    match act {
        Activation::Relu => x.max(0.0),
        Activation::Erf => statrs::function::erf::erf(x),
        Activation::Exp { sigma } => (x / sigma).exp(),
    }
}

/// Forward pass of the network drawn from `seed` on a batch of inputs.
/// Weights depend only on `(seed)`, independently of the batch.
pub fn mlp_forward(arch: &ArchConfig, seed: u64, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
    arch.validate()?;
    for x in inputs {
        if x.len() != arch.input_dim {
            return Err(Error::InvalidInput(format!(
                "input of length {} for input_dim {}",
                x.len(),
                arch.input_dim
            )));
        }
    }
    let dims = arch.dims();
    let sw = arch.weight_var.sqrt();
    let sb = arch.bias_var.sqrt();
    let mut outputs = Vec::with_capacity(inputs.len());
    // parameters drawn once, per-layer streams, identical for every input
    let layers: Vec<(Vec<f64>, Vec<f64>)> = (1..dims.len())
        .map(|l| {
            let mut rng = stream_rng(seed, l as u64);
            let w: Vec<f64> = (0..dims[l] * dims[l - 1]).map(|_| standard_normal(&mut rng)).collect();
            let b: Vec<f64> = (0..dims[l]).map(|_| standard_normal(&mut rng)).collect();
            (w, b)
        })
        .collect();
    for x in inputs {
        let mut h = x.clone();
        for (l, (w, b)) in layers.iter().enumerate() {
            let fan_in = dims[l];
            let fan_out = dims[l + 1];
            let pre: Vec<f64> = if l == 0 {
                h.clone()
            } else {
                h.iter().map(|v| apply_activation(arch.activation, *v)).collect()
            };
            let scale = sw / (fan_in as f64).sqrt();
            h = (0..fan_out)
                .map(|i| {
                    let dot: f64 =
                        w[i * fan_in..(i + 1) * fan_in].iter().zip(&pre).map(|(a, b)| a * b).sum();
                    scale * dot + sb * b[i]
                })
                .collect();
        }
        outputs.push(h[0]);
    }
    Ok(outputs)
}

/// Histogram of sign-thresholded network functions over {±1}^d.
#[derive(Debug, Clone)]
pub struct CensusHistogram {
    pub d: usize,
    /// Boolean function as a packed 2^d-bit string -> count.
    pub counts: HashMap<Vec<u64>, u64>,
    pub total: u64,
    /// Outputs that were exactly zero (thresholded to +1).
    pub ties: u64,
}

fn all_cube_inputs(d: usize) -> Vec<Vec<f64>> {
    (0..1u64 << d)
        .map(|mask| {
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect()
}

fn threshold_pack(outputs: &[f64]) -> (Vec<u64>, u64) {
    let mut bits = vec![0u64; (outputs.len() + 63) / 64];
    let mut ties = 0;
    for (i, v) in outputs.iter().enumerate() {
        if *v == 0.0 {
            ties += 1;
        }
        // sign threshold; exact zero counts as +1
        if *v >= 0.0 {
            bits[i / 64] |= 1u64 << (i % 64);
        }
    }
    (bits, ties)
}

/// Samples `n_samples` networks (seeds `base_seed..base_seed+n`),
/// thresholds each over the whole cube, and counts distinct boolean
/// functions. Parallel over seeds; the merge is a commutative sum, so the
/// result is independent of worker count.
pub fn boolean_census(arch: &ArchConfig, n_samples: u64, base_seed: u64) -> Result<CensusHistogram> {
    arch.validate()?;
    let d = arch.input_dim;
    if d > MAX_CENSUS_DIM {
        return Err(Error::Unsupported(format!("census limited to d <= {MAX_CENSUS_DIM}, got {d}")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let inputs = all_cube_inputs(d);
    let (counts, ties) = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let out = mlp_forward(arch, base_seed.wrapping_add(i), &inputs).expect("validated arch");
            threshold_pack(&out)
        })
        .fold(
            || (HashMap::<Vec<u64>, u64>::new(), 0u64),
            |(mut map, ties), (bits, t)| {
                *map.entry(bits).or_insert(0) += 1;
                (map, ties + t)
            },
        )
        .reduce(
            || (HashMap::new(), 0),
            |(mut a, ta), (b, tb)| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                (a, ta + tb)
            },
        );
    Ok(CensusHistogram { d, counts, total: n_samples, ties })
}

impl CensusHistogram {
    /// Largest single-function count.
    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

/// Empirical probabilities by descending rank: (1-based rank, probability).
pub fn rank_curve(h: &CensusHistogram) -> Result<Vec<(usize, f64)>> {
    if h.total == 0 || h.counts.is_empty() {
        return Err(Error::InvalidInput("empty histogram".into()));
    }
    let mut counts: Vec<u64> = h.counts.values().copied().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c as f64 / h.total as f64))
        .collect())
}
