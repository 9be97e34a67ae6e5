//! Spectra of neural kernels over the standard Gaussian N(0, I_d).
//!
//! Writing x = √q·ω with ω on the sphere and q ~ χ²_d/d independent, the
//! kernel Φ(t, q, q') averaged over the radial marginals becomes a sphere
//! kernel Φ̂_d(t) whose harmonic spectrum approximates the Gaussian
//! spectrum (exactly, degree by degree, in the homogeneous case).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::quadrature::gauss_rule_from_jacobi;
use crate::jet::Jet;
use crate::kernel::{phi_eval, phi_jet_with_norms, KernelConfig};
use crate::sphere::{sphere_spectrum_from_jet, sphere_spectrum_quadrature, SphereSpectrum};

/// Quadrature for the law of q = ‖x‖²/d, x ~ N(0, I_d), i.e. χ²_d/d.
#[derive(Debug, Clone)]
pub struct ChiSqRule {
    pub d: usize,
    pub nodes: Vec<f64>,
    /// Probability weights; they sum to 1.
    pub weights: Vec<f64>,
}

static CHI_CACHE: Lazy<Mutex<HashMap<(usize, usize), Arc<ChiSqRule>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The (cached) generalized Gauss–Laguerre rule for χ²_d/d with `n_nodes`
/// nodes, via Golub–Welsch on the monic Laguerre recurrence with
/// α = d/2 - 1. Weights are normalized eigenvector components, so no
/// Γ(d/2) mass factor ever materializes.
pub fn chi_sq_rule(d: usize, n_nodes: usize) -> Result<Arc<ChiSqRule>> {
    if d < 1 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    if n_nodes < 2 {
        return Err(Error::InvalidInput("quadrature needs at least 2 nodes".into()));
    }
    if let Some(r) = CHI_CACHE.lock().unwrap().get(&(d, n_nodes)) {
        return Ok(r.clone());
    }
    let alpha = d as f64 / 2.0 - 1.0;
    let diag: Vec<f64> = (0..n_nodes).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let offdiag: Vec<f64> =
        (1..n_nodes).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
    let (x_nodes, weights) = gauss_rule_from_jacobi(&diag, &offdiag, 1.0)?;
    // Laguerre variable x ~ Gamma(d/2) maps to q = 2x/d ~ χ²_d/d
    let nodes: Vec<f64> = x_nodes.into_iter().map(|x| 2.0 * x / d as f64).collect();
    let rule = Arc::new(ChiSqRule { d, nodes, weights });
    CHI_CACHE.lock().unwrap().insert((d, n_nodes), rule.clone());
    Ok(rule)
}

const DEFAULT_CHI_NODES: usize = 40;
const DEFAULT_JET_ORDER: usize = 64;
/// Above this dimension the Jacobi weight is too concentrated for generic
/// quadrature and the Taylor route is used instead.
pub const TAYLOR_DIMENSION_THRESHOLD: usize = 64;

/// The radially averaged kernel Φ̂_d(t) = E_{q,q'} Φ(t, q, q').
///
/// Only the independent diagonal average Σ_i w_i Φ(t, q_i, q_i) is needed
/// for spectra (the off-diagonal radial dependence enters through the
/// harmonic expansion itself), matching the sphere-lift construction.
pub fn hat_phi(cfg: &KernelConfig, t: f64, rule: &ChiSqRule) -> Result<f64> {
    let mut acc = 0.0;
    for (q, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * phi_eval(cfg, t, *q, *q)?;
    }
    Ok(acc)
}

/// Taylor jet of t ↦ Φ̂_d(t): the radial average of the per-node jets.
pub fn hat_phi_jet(cfg: &KernelConfig, order: usize, rule: &ChiSqRule) -> Result<Jet> {
    let mut acc = Jet::constant(0.0, order);
    for (q, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = acc.add(&phi_jet_with_norms(cfg, order, *q, *q)?.scale(*w))?;
    }
    Ok(acc)
}

/// Harmonic spectrum of a kernel config over N(0, I_d): the sphere
/// spectrum of Φ̂_d. Quadrature for moderate d, Taylor for large d.
pub fn gaussian_spectrum(cfg: &KernelConfig, d: usize, lmax: usize) -> Result<SphereSpectrum> {
    cfg.validate()?;
    if d < 3 {
        return Err(Error::InvalidInput(format!("harmonic expansion needs d >= 3, got {d}")));
    }
    let rule = chi_sq_rule(d, DEFAULT_CHI_NODES)?;
    if d > TAYLOR_DIMENSION_THRESHOLD {
        let order = DEFAULT_JET_ORDER.max(lmax + 32);
        let jet = hat_phi_jet(cfg, order, &rule)?;
        // radial averaging can leave -1e-17-size noise in odd slots
        let cleaned = Jet::new(
            jet.coeffs()
                .iter()
                .map(|c| if *c < 0.0 && *c > -1e-10 { 0.0 } else { *c })
                .collect(),
        )?;
        sphere_spectrum_from_jet(&cleaned, d, lmax, 1e-12)
    } else {
        sphere_spectrum_quadrature(|t| hat_phi(cfg, t, &rule).unwrap(), d, lmax, None)
    }
}

/// E R(q)² under q ~ χ²_d/d for a scalar radial profile.
pub fn radial_second_moment(rule: &ChiSqRule, radial: impl Fn(f64) -> f64) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(q, w)| {
            let r = radial(*q);
            w * r * r
        })
        .sum()
}

/// Checks that Φ(t, q, q') = R(q) R(q') Φ(t, 1, 1) on a sample of radii
/// and angles, the premise of the exact homogeneous factorization.
pub fn factorization_check(
    phi3: impl Fn(f64, f64, f64) -> Result<f64>,
    tol: f64,
) -> Result<()> {
    let base = |t: f64| phi3(t, 1.0, 1.0);
    let radial = |q: f64| -> Result<f64> { Ok((phi3(1.0, q, q)? / base(1.0)?).sqrt()) };
    for &(q, q2) in &[(0.25, 0.25), (0.5, 2.0), (1.5, 0.75), (3.0, 3.0)] {
        let rq = radial(q)?;
        let rq2 = radial(q2)?;
        for &t in &[0.2, 0.5, 0.9] {
            let lhs = phi3(t, q, q2)?;
            let rhs = rq * rq2 * base(t)?;
            if (lhs - rhs).abs() > tol * lhs.abs().max(rhs.abs()).max(1e-12) {
                return Err(Error::InvalidInput(format!(
                    "kernel does not factorize: Phi({t}, {q}, {q2}) = {lhs} vs {rhs}"
                )));
            }
        }
    }
    Ok(())
}

/// Exact Gaussian spectrum of a homogeneous kernel
/// Φ(t, q, q') = R(q)R(q')Φ(t): λ² a_l with λ² = E R(q)².
pub fn homogeneous_gaussian_spectrum(
    sphere: &SphereSpectrum,
    lambda_sq: f64,
) -> Result<Vec<f64>> {
    if !(lambda_sq > 0.0) {
        return Err(Error::InvalidInput(format!("lambda_sq must be positive, got {lambda_sq}")));
    }
    Ok(sphere.a.iter().map(|a| lambda_sq * a).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Activation, KernelKind};
    use approx::assert_relative_eq;

    fn cfg(depth: usize, act: Activation, sw: f64, sb: f64, kind: KernelKind) -> KernelConfig {
        KernelConfig { depth, activation: act, weight_var: sw, bias_var: sb, kind }
    }

    #[test]
    fn chi_sq_moments() {
        for d in [1usize, 4, 16, 128] {
            let rule = chi_sq_rule(d, 40).unwrap();
            let moment = |p: i32| -> f64 {
                rule.nodes.iter().zip(&rule.weights).map(|(q, w)| w * q.powi(p)).sum()
            };
            let df = d as f64;
            assert_relative_eq!(moment(0), 1.0, max_relative = 1e-12);
            assert_relative_eq!(moment(1), 1.0, max_relative = 1e-12);
            assert_relative_eq!(moment(2), 1.0 + 2.0 / df, max_relative = 1e-12);
            assert_relative_eq!(
                moment(3),
                (df + 2.0) * (df + 4.0) / (df * df),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn chi_sq_nodes_positive() {
        let rule = chi_sq_rule(7, 32).unwrap();
        assert!(rule.nodes.iter().all(|q| *q > 0.0));
        assert!(rule.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn hat_phi_affine_kernel() {
        // depth-1: Φ(t, q, q) = σ_w² t q + σ_b², so Φ̂(t) = σ_w² t E[q] + σ_b²
        let c = cfg(1, Activation::Relu, 1.3, 0.4, KernelKind::Ck);
        let rule = chi_sq_rule(9, 40).unwrap();
        for t in [-0.7, 0.0, 0.5] {
            assert_relative_eq!(hat_phi(&c, t, &rule).unwrap(), 1.3 * t + 0.4, max_relative = 1e-11);
        }
    }

    #[test]
    fn affine_gaussian_spectrum() {
        let c = cfg(1, Activation::Relu, 2.0, 1.0, KernelKind::Ck);
        for d in [6usize, 96] {
            let s = gaussian_spectrum(&c, d, 4).unwrap();
            assert_relative_eq!(s.a[0], 1.0, max_relative = 1e-9);
            assert_relative_eq!(s.a[1], 2.0 / d as f64, max_relative = 1e-9);
            for l in 2..=4 {
                assert!(s.a[l].abs() < 1e-10, "d={d} l={l}: {}", s.a[l]);
            }
        }
    }

    #[test]
    fn relu_is_one_homogeneous() {
        // relu CK without bias: Φ(t, q, q') = sqrt(q q') Φ(t, 1, 1)
        let c = cfg(3, Activation::Relu, 2.0, 0.0, KernelKind::Ck);
        factorization_check(|t, q, q2| phi_eval(&c, t, q, q2), 1e-10).unwrap();
    }

    #[test]
    fn erf_is_not_homogeneous() {
        let c = cfg(2, Activation::Erf, 2.0, 0.0, KernelKind::Ck);
        assert!(factorization_check(|t, q, q2| phi_eval(&c, t, q, q2), 1e-10).is_err());
    }

    #[test]
    fn homogeneous_route_matches_direct_average() {
        // relu CK, R(q) = sqrt(q): λ² = E q = 1, so Gaussian = sphere exactly
        let c = cfg(2, Activation::Relu, 2.0, 0.0, KernelKind::Ck);
        let d = 10;
        let sphere =
            sphere_spectrum_quadrature(|t| phi_eval(&c, t, 1.0, 1.0).unwrap(), d, 6, None).unwrap();
        let rule = chi_sq_rule(d, 40).unwrap();
        let lambda_sq = radial_second_moment(&rule, |q| q.sqrt());
        assert_relative_eq!(lambda_sq, 1.0, max_relative = 1e-12);
        let exact = homogeneous_gaussian_spectrum(&sphere, lambda_sq).unwrap();
        let avg = gaussian_spectrum(&c, d, 6).unwrap();
        for l in 0..=6 {
            assert_relative_eq!(exact[l], avg.a[l], max_relative = 1e-8, epsilon = 1e-13);
        }
    }

    #[test]
    fn quadrature_and_taylor_regimes_agree() {
        // straddle the method-selection threshold with the same kernel and
        // check continuity of the eigenvalue pattern in d
        let c = cfg(2, Activation::Erf, 2.0, 0.001, KernelKind::Ck);
        let s64 = gaussian_spectrum(&c, 64, 3).unwrap();
        let s65 = gaussian_spectrum(&c, 65, 3).unwrap();
        for l in 0..=3 {
            let scaled_64 = s64.a[l] * 64f64.powi(l as i32);
            let scaled_65 = s65.a[l] * 65f64.powi(l as i32);
            assert!(
                (scaled_64 - scaled_65).abs() / scaled_64.abs().max(1e-12) < 0.1,
                "l={l}: {scaled_64} vs {scaled_65}"
            );
        }
    }

    #[test]
    fn taylor_regime_matches_forced_quadrature() {
        let c = cfg(2, Activation::Erf, 2.0, 0.001, KernelKind::Ck);
        let d = 80;
        let taylor = gaussian_spectrum(&c, d, 3).unwrap();
        let rule = chi_sq_rule(d, DEFAULT_CHI_NODES).unwrap();
        let quad =
            sphere_spectrum_quadrature(|t| hat_phi(&c, t, &rule).unwrap(), d, 3, Some(400)).unwrap();
        for l in 0..=3 {
            assert!(
                (taylor.a[l] - quad.a[l]).abs() / quad.a[l].abs().max(1e-14) < 1e-6,
                "l={l}: taylor {} quad {}",
                taylor.a[l],
                quad.a[l]
            );
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(chi_sq_rule(0, 10).is_err());
        assert!(chi_sq_rule(5, 1).is_err());
        let c = cfg(2, Activation::Relu, 2.0, 0.0, KernelKind::Ck);
        assert!(gaussian_spectrum(&c, 2, 3).is_err());
        let sphere = SphereSpectrum {
            d: 5,
            a: vec![1.0],
            method: crate::sphere::SphereMethod::Quadrature,
            truncated: false,
        };
        assert!(homogeneous_gaussian_spectrum(&sphere, 0.0).is_err());
    }
}

