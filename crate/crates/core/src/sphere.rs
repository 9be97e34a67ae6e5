//! Spectra of rotation-invariant kernels over the sphere √d·S^{d-1}.
//!
//! A kernel K(x, y) = Φ(⟨x,y⟩/d) acting on the uniform sphere measure
//! diagonalizes in spherical harmonics: every degree-l harmonic is an
//! eigenfunction with eigenvalue a_l, obtained either by Gauss–Jacobi
//! quadrature against Gegenbauer polynomials or from the Taylor
//! coefficients of Φ at 0.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature::gauss_rule_from_jacobi;

/// How a sphere spectrum was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereMethod {
    Quadrature,
    Taylor,
}

/// Eigenvalues a_0..a_lmax of a kernel over √d·S^{d-1}, one per harmonic
/// degree.
#[derive(Debug, Clone)]
pub struct SphereSpectrum {
    pub d: usize,
    pub a: Vec<f64>,
    pub method: SphereMethod,
    /// Taylor route only: the coefficient series ran out before the
    /// requested convergence tolerance at some degree.
    pub truncated: bool,
}

/// Gegenbauer polynomial C_l^{(α)}(t), α = (d-2)/2, via the three-term
/// recurrence. Returns values for all degrees 0..=lmax at once.
pub fn gegenbauer_all(d: usize, lmax: usize, t: f64) -> Result<Vec<f64>> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("sphere harmonics need d >= 3, got {d}")));
    }
    let alpha = (d as f64 - 2.0) / 2.0;
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax >= 1 {
        out.push(2.0 * alpha * t);
    }
    for n in 2..=lmax {
        let nf = n as f64;
        let c = (2.0 * (nf + alpha - 1.0) * t * out[n - 1] - (nf + 2.0 * alpha - 2.0) * out[n - 2]) / nf;
        out.push(c);
    }
    Ok(out)
}

/// C_l^{(α)}(t) for a single degree.
pub fn gegenbauer_eval(d: usize, l: usize, t: f64) -> Result<f64> {
    Ok(*gegenbauer_all(d, l, t)?.last().unwrap())
}

/// ∫_{-1}^{1} C_l^{(α)}(t)² (1-t²)^{α-1/2} dt, α = (d-2)/2, in log-gamma
/// arithmetic so large d and l do not overflow.
pub fn gegenbauer_sq_norm(d: usize, l: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("sphere harmonics need d >= 3, got {d}")));
    }
    let alpha = (d as f64 - 2.0) / 2.0;
    let n = l as f64;
    let ln = std::f64::consts::PI.ln() + (1.0 - 2.0 * alpha) * std::f64::consts::LN_2
        + ln_gamma(n + 2.0 * alpha)
        - ln_gamma(n + 1.0)
        - (n + alpha).ln()
        - 2.0 * ln_gamma(alpha);
    Ok(ln.exp())
}

/// C_l^{(α)}(1) = binom(l + 2α - 1, l), the sup of |C_l| on [-1, 1].
pub fn gegenbauer_at_one(d: usize, l: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("sphere harmonics need d >= 3, got {d}")));
    }
    let two_alpha = d as f64 - 2.0;
    let n = l as f64;
    Ok((ln_gamma(n + two_alpha) - ln_gamma(n + 1.0) - ln_gamma(two_alpha)).exp())
}

/// Ratio of the degree-l eigenvalue to the Gegenbauer projection,
/// c_{d,l} = (d-2)/(d+2l-2).
pub fn harmonic_weight(d: usize, l: usize) -> f64 {
    (d as f64 - 2.0) / (d as f64 + 2.0 * l as f64 - 2.0)
}

/// A Gauss–Jacobi rule for the weight (1-t²)^{(d-3)/2} on [-1, 1].
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub d: usize,
    pub nodes: Vec<f64>,
    /// Absolute weights; they sum to √π Γ((d-1)/2)/Γ(d/2).
    pub weights: Vec<f64>,
}

static JACOBI_CACHE: Lazy<Mutex<HashMap<(usize, usize), Arc<JacobiRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The (cached) Gauss–Jacobi rule with `n_nodes` nodes for dimension d.
pub fn jacobi_rule(d: usize, n_nodes: usize) -> Result<Arc<JacobiRule>> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("jacobi rule needs d >= 3, got {d}")));
    }
    if n_nodes < 2 {
        return Err(Error::InvalidInput("quadrature needs at least 2 nodes".into()));
    }
    if let Some(r) = JACOBI_CACHE.lock().unwrap().get(&(d, n_nodes)) {
        return Ok(r.clone());
    }
    // monic recurrence for jacobi weight (1-t)^a (1+t)^a, a = (d-3)/2
    let a = (d as f64 - 3.0) / 2.0;
    let diag = vec![0.0; n_nodes];
    let offdiag: Vec<f64> = (1..n_nodes)
        .map(|k| {
            let k = k as f64;
            (k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0))).sqrt()
        })
        .collect();
    let total_mass =
        (0.5 * std::f64::consts::PI.ln() + ln_gamma(a + 1.0) - ln_gamma(a + 1.5)).exp();
    let (nodes, weights) = gauss_rule_from_jacobi(&diag, &offdiag, total_mass)?;
    let rule = Arc::new(JacobiRule { d, nodes, weights });
    JACOBI_CACHE.lock().unwrap().insert((d, n_nodes), rule.clone());
    Ok(rule)
}

/// Sphere eigenvalues by quadrature: a_l = c_{d,l} ⟨Φ, C_l⟩_w / ‖C_l‖².
pub fn sphere_spectrum_quadrature(
    phi: impl Fn(f64) -> f64,
    d: usize,
    lmax: usize,
    n_nodes: Option<usize>,
) -> Result<SphereSpectrum> {
    let n = n_nodes.unwrap_or(4 * lmax + 64);
    if n < lmax + 16 {
        return Err(Error::InvalidInput(format!(
            "quadrature with {n} nodes cannot resolve degree {lmax}"
        )));
    }
    let rule = jacobi_rule(d, n)?;
    let mut proj = vec![0.0; lmax + 1];
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let p = phi(*t);
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite Phi value at node {t}")));
        }
        let geg = gegenbauer_all(d, lmax, *t)?;
        for l in 0..=lmax {
            proj[l] += w * p * geg[l];
        }
    }
    let a = (0..=lmax)
        .map(|l| Ok(harmonic_weight(d, l) * proj[l] / gegenbauer_sq_norm(d, l)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SphereSpectrum { d, a, method: SphereMethod::Quadrature, truncated: false })
}

/// Sphere eigenvalues from a Taylor jet of Φ at 0 with nonnegative
/// coefficients:
/// a_l = Γ(d/2) Σ_k Φ^{(l+2k)}(0) / (2^{l+2k} k! Γ(d/2 + l + k)).
///
/// Terms are assembled in log space; summation for each degree stops when
/// a term falls below `tol` times the accumulated value. If the jet runs
/// out first, `truncated` is set.
pub fn sphere_spectrum_from_jet(jet: &Jet, d: usize, lmax: usize, tol: f64) -> Result<SphereSpectrum> {
    if d < 3 {
        return Err(Error::InvalidInput(format!("sphere harmonics need d >= 3, got {d}")));
    }
    let order = jet.order();
    let half_d = d as f64 / 2.0;
    let coeffs = jet.coeffs();
    if let Some(c) = coeffs.iter().find(|c| **c < -1e-10) {
        return Err(Error::InvalidInput(format!(
            "Taylor route requires nonnegative series coefficients, found {c}"
        )));
    }
    let mut a = Vec::with_capacity(lmax + 1);
    let mut truncated = false;
    for l in 0..=lmax {
        let mut acc = 0.0f64;
        let mut converged = false;
        let mut k = 0usize;
        loop {
            let n = l + 2 * k;
            if n > order {
                break;
            }
            let c = coeffs[n].max(0.0);
            let term = if c > 0.0 {
                // c_n n! / (2^n k! Γ(d/2 + l + k)) * Γ(d/2)
                let ln_term = c.ln() + ln_gamma(n as f64 + 1.0) - n as f64 * std::f64::consts::LN_2
                    - ln_gamma(k as f64 + 1.0)
                    + ln_gamma(half_d)
                    - ln_gamma(half_d + l as f64 + k as f64);
                ln_term.exp()
            } else {
                0.0
            };
            acc += term;
            // exact zeros (parity gaps, polynomial kernels) count as
            // converged tails
            if k >= 1 && term <= tol * acc.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
            k += 1;
        }
        if !converged && acc > 0.0 {
            truncated = true;
        }
        a.push(acc);
    }
    Ok(SphereSpectrum { d, a, method: SphereMethod::Taylor, truncated })
}
