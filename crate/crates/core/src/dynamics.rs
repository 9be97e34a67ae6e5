//! Kernel gradient descent, GP posteriors, and max learning rates on the
//! boolean cube.
//!
//! All operators act on the uniform measure over {±1}^d: the kernel
//! operator is (K g)(x) = 2^{-d} Σ_y K(x, y) g(y), and full-batch GD on
//! the population square loss updates g ← g - 2α K (g - g*). In the
//! monomial eigenbasis each coefficient error contracts by (1 - 2αμ_k).

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::boolcube::CubeSpectrum;
use crate::error::{Error, Result};
use crate::rng::{standard_normal, stream_rng};

/// Largest cube dimension for which dense 2^d representations are allowed.
const MAX_DENSE_DIM: usize = 20;

/// Kernel values by Hamming distance, the full Gram information of a
/// Φ-kernel on the cube: K(x, y) = values[ham(x, y)].
#[derive(Debug, Clone)]
pub struct GramByDistance {
    pub d: usize,
    pub values: Vec<f64>,
}

impl GramByDistance {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != d + 1 {
            return Err(Error::InvalidInput(format!(
                "need {} kernel values for d = {d}, got {}",
                d + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite kernel value".into()));
        }
        Ok(GramByDistance { d, values })
    }

    /// Builds the Gram table by sampling Φ on the distance grid.
    pub fn from_phi(phi: impl Fn(f64) -> f64, d: usize) -> Result<Self> {
        let grid = crate::boolcube::PhiGrid::sample(phi, d)?;
        GramByDistance::new(d, grid.values)
    }

    pub fn entry(&self, x: u64, y: u64) -> f64 {
        self.values[(x ^ y).count_ones() as usize]
    }
}

/// A real function on {±1}^d, as point values or Fourier coefficients.
/// Points and coefficients are both indexed by bitmask (bit set means the
/// coordinate is -1; coefficient masks name monomial supports).
#[derive(Debug, Clone, PartialEq)]
pub enum CubeFunction {
    Points { d: usize, values: Vec<f64> },
    Fourier { d: usize, coeffs: Vec<f64> },
}

fn check_dense_dim(d: usize, len: usize) -> Result<()> {
    if d > MAX_DENSE_DIM {
        return Err(Error::Unsupported(format!(
            "dense cube functions limited to d <= {MAX_DENSE_DIM}, got {d}"
        )));
    }
    if len != 1usize << d {
        return Err(Error::InvalidInput(format!("need 2^{d} entries, got {len}")));
    }
    Ok(())
}

// in-place Walsh-Hadamard transform
fn wht(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for chunk in v.chunks_mut(2 * h) {
            for i in 0..h {
                let (a, b) = (chunk[i], chunk[i + h]);
                chunk[i] = a + b;
                chunk[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

impl CubeFunction {
    pub fn from_points(d: usize, values: Vec<f64>) -> Result<Self> {
        check_dense_dim(d, values.len())?;
        Ok(CubeFunction::Points { d, values })
    }

    pub fn from_fourier(d: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dense_dim(d, coeffs.len())?;
        Ok(CubeFunction::Fourier { d, coeffs })
    }

    pub fn dim(&self) -> usize {
        match self {
            CubeFunction::Points { d, .. } | CubeFunction::Fourier { d, .. } => *d,
        }
    }

    /// Point values; χ_S(x) = (-1)^{|S ∩ x|} with masks as above.
    pub fn to_points(&self) -> CubeFunction {
        match self {
            CubeFunction::Points { .. } => self.clone(),
            CubeFunction::Fourier { d, coeffs } => {
                let mut values = coeffs.clone();
                wht(&mut values);
                CubeFunction::Points { d: *d, values }
            }
        }
    }

    pub fn to_fourier(&self) -> CubeFunction {
        match self {
            CubeFunction::Fourier { .. } => self.clone(),
            CubeFunction::Points { d, values } => {
                let mut coeffs = values.clone();
                wht(&mut coeffs);
                let scale = 1.0 / (1usize << d) as f64;
                for c in &mut coeffs {
                    *c *= scale;
                }
                CubeFunction::Fourier { d: *d, coeffs }
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            CubeFunction::Points { values, .. } => values,
            CubeFunction::Fourier { coeffs, .. } => coeffs,
        }
    }

    /// Population mean square: E_x f(x)² = Σ_S f̂(S)².
    pub fn mean_square(&self) -> f64 {
        match self {
            CubeFunction::Points { values, .. } => {
                values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64
            }
            CubeFunction::Fourier { coeffs, .. } => coeffs.iter().map(|c| c * c).sum(),
        }
    }
}

/// One step of a recorded GD run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    /// Population square loss E_x (g - g*)².
    pub loss: f64,
    /// Mean square loss over the training set, for masked runs.
    pub train_loss: Option<f64>,
    pub diverged: bool,
}

const DIVERGENCE_FACTOR: f64 = 1e6;

fn diverged(loss: f64, initial: f64) -> bool {
    !loss.is_finite() || loss > DIVERGENCE_FACTOR * initial.max(f64::MIN_POSITIVE)
}

/// GD on the population loss in the eigenbasis: each Fourier coefficient
/// error contracts by (1 - 2αμ_{|S|}) per step. Exact and O(2^d) per step.
pub fn gd_trajectory_eigen(
    spectrum: &CubeSpectrum,
    target: &CubeFunction,
    alpha: f64,
    steps: usize,
) -> Result<Vec<TrajectoryRecord>> {
    if target.dim() != spectrum.d {
        return Err(Error::InvalidInput(format!(
            "target dimension {} does not match spectrum dimension {}",
            target.dim(),
            spectrum.d
        )));
    }
    let fourier = target.to_fourier();
    let coeffs = fourier.values();
    let factors: Vec<f64> = (0..coeffs.len())
        .map(|mask| 1.0 - 2.0 * alpha * spectrum.mu[(mask as u64).count_ones() as usize])
        .collect();
    let mut err: Vec<f64> = coeffs.to_vec();
    let initial: f64 = err.iter().map(|e| e * e).sum();
    let mut records = Vec::with_capacity(steps + 1);
    records.push(TrajectoryRecord { step: 0, loss: initial, train_loss: None, diverged: false });
    for step in 1..=steps {
        for (e, f) in err.iter_mut().zip(&factors) {
            *e *= f;
        }
        let loss: f64 = err.iter().map(|e| e * e).sum();
        let div = diverged(loss, initial);
        records.push(TrajectoryRecord { step, loss, train_loss: None, diverged: div });
        if div {
            break;
        }
    }
    Ok(records)
}

/// GD on the population loss with the explicit 2^d x 2^d kernel operator,
/// g ← g - 2α K(g - g*); the direct-route cross-check of the eigen mode.
pub fn gd_trajectory_matrix(
    gram: &GramByDistance,
    target: &CubeFunction,
    alpha: f64,
    steps: usize,
) -> Result<Vec<TrajectoryRecord>> {
    let d = gram.d;
    if target.dim() != d {
        return Err(Error::InvalidInput(format!(
            "target dimension {} does not match gram dimension {d}",
            target.dim()
        )));
    }
    let n = 1usize << d;
    let target_vals = target.to_points().values().to_vec();
    let mut g = vec![0.0f64; n];
    let measure = 1.0 / n as f64;
    let loss_of = |g: &[f64]| -> f64 {
        g.iter().zip(&target_vals).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() * measure
    };
    let initial = loss_of(&g);
    let mut records = Vec::with_capacity(steps + 1);
    records.push(TrajectoryRecord { step: 0, loss: initial, train_loss: None, diverged: false });
    for step in 1..=steps {
        let resid: Vec<f64> = g.iter().zip(&target_vals).map(|(a, b)| a - b).collect();
        for x in 0..n as u64 {
            let mut kv = 0.0;
            for (y, r) in resid.iter().enumerate() {
                kv += gram.entry(x, y as u64) * r;
            }
            g[x as usize] -= 2.0 * alpha * measure * kv;
        }
        let loss = loss_of(&g);
        let div = diverged(loss, initial);
        records.push(TrajectoryRecord { step, loss, train_loss: None, diverged: div });
        if div {
            break;
        }
    }
    Ok(records)
}

/// GD on the empirical loss over a training subset:
/// g ← g - (2α/m) Σ_{y ∈ train} K(·, y)(g(y) - g*(y)).
/// Records both train and population loss. With the full cube as training
/// set this reproduces [`gd_trajectory_matrix`] exactly.
pub fn masked_gd_trajectory(
    gram: &GramByDistance,
    train: &[u64],
    target: &CubeFunction,
    alpha: f64,
    steps: usize,
) -> Result<Vec<TrajectoryRecord>> {
    let d = gram.d;
    if target.dim() != d {
        return Err(Error::InvalidInput(format!(
            "target dimension {} does not match gram dimension {d}",
            target.dim()
        )));
    }
    let n = 1usize << d;
    if train.is_empty() {
        return Err(Error::InvalidInput("training set is empty".into()));
    }
    if train.iter().any(|x| *x >= n as u64) {
        return Err(Error::InvalidInput("training point outside the cube".into()));
    }
    let target_vals = target.to_points().values().to_vec();
    let mut g = vec![0.0f64; n];
    let m = train.len() as f64;
    let pop_loss = |g: &[f64]| -> f64 {
        g.iter().zip(&target_vals).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n as f64
    };
    let train_loss = |g: &[f64]| -> f64 {
        train
            .iter()
            .map(|x| {
                let e = g[*x as usize] - target_vals[*x as usize];
                e * e
            })
            .sum::<f64>()
            / m
    };
    let initial = train_loss(&g);
    let mut records = Vec::with_capacity(steps + 1);
    records.push(TrajectoryRecord {
        step: 0,
        loss: pop_loss(&g),
        train_loss: Some(initial),
        diverged: false,
    });
    for step in 1..=steps {
        let resid: Vec<f64> = train.iter().map(|x| g[*x as usize] - target_vals[*x as usize]).collect();
        for x in 0..n as u64 {
            let mut kv = 0.0;
            for (y, r) in train.iter().zip(&resid) {
                kv += gram.entry(x, *y) * r;
            }
            g[x as usize] -= 2.0 * alpha / m * kv;
        }
        let tl = train_loss(&g);
        let div = diverged(tl, initial);
        records.push(TrajectoryRecord {
            step,
            loss: pop_loss(&g),
            train_loss: Some(tl),
            diverged: div,
        });
        if div {
            break;
        }
    }
    Ok(records)
}

/// Kernel ridgeless regression posterior (the t → ∞ limit of kernel GD on
/// the training set).
#[derive(Debug, Clone)]
pub struct GpPosterior {
    gram: GramByDistance,
    train: Vec<u64>,
    weights: DVector<f64>,
    /// A ridge of 1e-10 K(x, x) was needed to factor the Gram matrix.
    pub ridge_used: bool,
}

impl GpPosterior {
    /// Solves K_train c = y (Cholesky; on failure retries once with a
    /// small ridge and reports it).
    pub fn fit(gram: &GramByDistance, train: &[u64], values: &[f64]) -> Result<GpPosterior> {
        if train.is_empty() || train.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "need matching nonempty train points and values, got {} and {}",
                train.len(),
                values.len()
            )));
        }
        let m = train.len();
        let build = |ridge: f64| {
            DMatrix::from_fn(m, m, |i, j| {
                gram.entry(train[i], train[j]) + if i == j { ridge } else { 0.0 }
            })
        };
        let y = DVector::from_column_slice(values);
        // a singular Gram matrix can slip past Cholesky through roundoff
        // with a tiny positive pivot; verify the solve actually solved
        let y_scale = y.amax().max(1e-30);
        let solve_ok = |w: &DVector<f64>| (build(0.0) * w - &y).amax() <= 1e-8 * y_scale;
        let mut ridge_used = false;
        let weights = match Cholesky::new(build(0.0)) {
            Some(c) => {
                let w = c.solve(&y);
                if solve_ok(&w) {
                    Some(w)
                } else {
                    None
                }
            }
            None => None,
        };
        let weights = match weights {
            Some(w) => w,
            None => {
                ridge_used = true;
                let ridge = 1e-10 * gram.values[0].abs().max(1.0);
                let c = Cholesky::new(build(ridge)).ok_or_else(|| {
                    Error::NumericalInconsistency(
                        "training Gram matrix is not positive definite even with ridge".into(),
                    )
                })?;
                c.solve(&y)
            }
        };
        Ok(GpPosterior { gram: gram.clone(), train: train.to_vec(), weights, ridge_used })
    }

    /// Posterior mean at a cube point: k(x, train) · K_train^{-1} y.
    pub fn predict(&self, x: u64) -> f64 {
        self.train
            .iter()
            .zip(self.weights.iter())
            .map(|(t, w)| self.gram.entry(x, *t) * w)
            .sum()
    }
}

/// A draw from the mean-zero GP with covariance K: independent Fourier
/// coefficients √μ_{|S|}·z_S, z_S standard normal on the stream keyed by
/// S, so a coefficient's value depends only on (seed, S).
pub fn gp_sample(spectrum: &CubeSpectrum, seed: u64, max_degree: usize) -> Result<CubeFunction> {
    let d = spectrum.d;
    if d > MAX_DENSE_DIM {
        return Err(Error::Unsupported(format!(
            "dense GP samples limited to d <= {MAX_DENSE_DIM}, got {d}"
        )));
    }
    let coeffs: Vec<f64> = (0..1u64 << d)
        .map(|mask| {
            let k = mask.count_ones() as usize;
            if k > max_degree {
                return 0.0;
            }
            let sd = spectrum.mu[k].max(0.0).sqrt();
            sd * standard_normal(&mut stream_rng(seed, mask))
        })
        .collect();
    CubeFunction::from_fourier(d, coeffs)
}

/// Which theoretical maximum-learning-rate to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxLrMode {
    /// n / λ_max with λ_max = max(μ_0, μ_1), the top kernel eigenvalue.
    Exact,
    /// The n / Φ(0) surrogate, cheap and spectrum-free.
    PhiZero,
}

/// Theoretical maximum learning rate for GD with `n_outputs` outputs.
pub fn max_lr(mode: MaxLrMode, spectrum: Option<&CubeSpectrum>, phi_zero: f64, n_outputs: usize) -> Result<f64> {
    if n_outputs < 1 {
        return Err(Error::InvalidInput("need at least one output".into()));
    }
    match mode {
        MaxLrMode::Exact => {
            let s = spectrum
                .ok_or_else(|| Error::InvalidInput("exact max LR needs a spectrum".into()))?;
            let top = s.mu[0].max(*s.mu.get(1).unwrap_or(&0.0));
            if !(top > 0.0) {
                return Err(Error::InvalidInput(format!("top eigenvalue must be positive, got {top}")));
            }
            Ok(n_outputs as f64 / top)
        }
        MaxLrMode::PhiZero => {
            if !(phi_zero > 0.0) {
                return Err(Error::InvalidInput(format!("Phi(0) must be positive, got {phi_zero}")));
            }
            Ok(n_outputs as f64 / phi_zero)
        }
    }
}

/// Binary search for the empirical divergence threshold: `diverges` must
/// be monotone in α. Starts from [0, upper], halves the bracket until it
/// is narrower than `tol`, and returns the upper end (guaranteed-diverging
/// side, matching the convention that the result overestimates by < tol).
pub fn empirical_max_lr(
    mut diverges: impl FnMut(f64) -> bool,
    upper: f64,
    tol: f64,
) -> Result<f64> {
    if !(upper > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput("upper bound and tolerance must be positive".into()));
    }
    if !diverges(upper) {
        return Err(Error::InvalidInput(format!(
            "simulation does not diverge at the upper bound {upper}"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = upper;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if diverges(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::NumericalInconsistency(
            "simulation diverges for arbitrarily small learning rates".into(),
        ));
    }
    Ok(hi)
}
