//! Eigenvalues of a neural kernel over the boolean cube {±1}^d.
//!
//! Every degree-k monomial χ_S is an eigenfunction with eigenvalue μ_k.
//! The eigenvalues are finite-difference/averaging combinations of Φ on the
//! grid {(d/2 - r)Δ : r = 0..d}, Δ = 2/d, computed here with the stable
//! split into large-step differences followed by adjacent-pair averaging.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernel::{phi_eval, KernelConfig};

/// Eigenvalues μ_0..μ_d of a kernel over {±1}^d, one per monomial degree.
#[derive(Debug, Clone)]
pub struct CubeSpectrum {
    pub d: usize,
    pub mu: Vec<f64>,
    /// Φ(1), cached for trace checks.
    pub phi_one: f64,
}

/// Kernel values Φ((d/2 - r)Δ) indexed by Hamming distance r.
#[derive(Debug, Clone)]
pub struct PhiGrid {
    pub d: usize,
    pub values: Vec<f64>,
}

impl PhiGrid {
    /// Evaluates `phi` on the distance grid; `values[r] = Φ(1 - 2r/d)`.
    pub fn sample(phi: impl Fn(f64) -> f64, d: usize) -> Result<PhiGrid> {
        if d < 1 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        let values: Vec<f64> = (0..=d)
            .map(|r| phi((d as f64 - 2.0 * r as f64) / d as f64))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite Phi value on grid".into()));
        }
        Ok(PhiGrid { d, values })
    }
}

/// Exact coefficient of x^r in (1 - x)^k (1 + x)^(d-k).
pub fn c_coef(d: usize, k: usize, r: usize) -> Result<BigInt> {
    if k > d || r > d {
        return Err(Error::InvalidInput(format!("c_coef indices out of range: d={d} k={k} r={r}")));
    }
    Ok(c_coef_row(d, k)?[r].clone())
}

/// All coefficients of (1 - x)^k (1 + x)^(d-k), degree 0..=d.
pub fn c_coef_row(d: usize, k: usize) -> Result<Vec<BigInt>> {
    if k > d {
        return Err(Error::InvalidInput(format!("c_coef indices out of range: d={d} k={k}")));
    }
    let mut poly = vec![BigInt::one()];
    for _ in 0..k {
        poly = poly_mul_linear(&poly, -1);
    }
    for _ in 0..d - k {
        poly = poly_mul_linear(&poly, 1);
    }
    Ok(poly)
}

// multiply by (1 + sign*x)
fn poly_mul_linear(poly: &[BigInt], sign: i32) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i] += c;
        if sign > 0 {
            out[i + 1] += c;
        } else {
            out[i + 1] -= c;
        }
    }
    out
}

/// μ_k by two independent routes with an agreement check: direct
/// enumeration of the defining expectation over all 2^d cube points, and
/// the signed coefficient sum against the Φ grid. Oracle for
/// [`cube_spectrum`].
pub fn mu_reference(grid: &PhiGrid, k: usize) -> Result<f64> {
    let d = grid.d;
    if k > d {
        return Err(Error::InvalidInput(format!("degree {k} > dimension {d}")));
    }
    if d > 40 {
        return Err(Error::Unsupported(format!("mu_reference limited to d <= 40, got {d}")));
    }
    let by_coef = mu_by_coefficients(grid, k)?;
    if d > 24 {
        return Ok(by_coef);
    }
    let by_enum = mu_by_enumeration(grid, k);
    // absolute floor against roundoff of exactly cancelling sums
    let grid_scale = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = by_enum.abs().max(by_coef.abs()).max(1e-10 * grid_scale).max(1e-300);
    if (by_enum - by_coef).abs() / scale > 1e-6 {
        return Err(Error::NumericalInconsistency(format!(
            "mu_{k} routes disagree: enumeration {by_enum} vs coefficients {by_coef}"
        )));
    }
    Ok(by_enum)
}

// E_x x^S Phi(sum_i x_i / d) with S = {1..k}, literally over all 2^d points.
fn mu_by_enumeration(grid: &PhiGrid, k: usize) -> f64 {
    let d = grid.d;
    let low_mask: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut sum = 0.0;
    for x in 0u64..(1u64 << d) {
        // bit set = coordinate -1
        let r = x.count_ones() as usize;
        let sign = if (x & low_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * grid.values[r];
    }
    sum / (1u64 << d) as f64
}

fn mu_by_coefficients(grid: &PhiGrid, k: usize) -> Result<f64> {
    let d = grid.d;
    let row = c_coef_row(d, k)?;
    let sum: f64 = row
        .iter()
        .zip(&grid.values)
        .map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v)
        .sum();
    Ok(sum / 2f64.powi(d as i32))
}

/// All eigenvalues μ_0..μ_d via the numerically stable shift-operator
/// factorization: k differences with step 2Δ then d-2k adjacent averages
/// (and the mirrored factorization for 2k > d).
pub fn cube_spectrum(phi: impl Fn(f64) -> f64, d: usize) -> Result<CubeSpectrum> {
    let grid = PhiGrid::sample(phi, d)?;
    cube_spectrum_from_grid(&grid, false)
}

/// [`cube_spectrum`] for a CK/NTK config; also debug-asserts the
/// nonnegativity of the final eigenvalues that neural kernels guarantee.
pub fn cube_spectrum_config(cfg: &KernelConfig, d: usize) -> Result<CubeSpectrum> {
    cfg.validate()?;
    let grid = PhiGrid::sample(|t| phi_eval(cfg, t, 1.0, 1.0).expect("validated config"), d)?;
    cube_spectrum_from_grid(&grid, true)
}

/// Stable spectrum from an already-sampled grid.
pub fn cube_spectrum_from_grid(grid: &PhiGrid, neural: bool) -> Result<CubeSpectrum> {
    let d = grid.d;
    let phi_one = grid.values[0];
    let mut mu = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let mut g = grid.values.clone();
        // each step-2Δ difference stands for a ((I-T_Δ)/2)((I+T_Δ)/2) pair
        // and so carries a factor 1/4
        if 2 * k <= d {
            // ((I - T_{2Δ})/4)^k then ((I + T_Δ)/2)^(d-2k)
            for _ in 0..k {
                for r in 0..g.len() - 2 {
                    g[r] = 0.25 * (g[r] - g[r + 2]);
                }
                g.truncate(g.len() - 2);
            }
            for _ in 0..d - 2 * k {
                for r in 0..g.len() - 1 {
                    g[r] = 0.5 * (g[r] + g[r + 1]);
                }
                g.truncate(g.len() - 1);
            }
        } else {
            // ((I - T_{2Δ})/4)^(d-k) then ((I - T_Δ)/2)^(2k-d)
            for _ in 0..d - k {
                for r in 0..g.len() - 2 {
                    g[r] = 0.25 * (g[r] - g[r + 2]);
                }
                g.truncate(g.len() - 2);
            }
            for _ in 0..2 * k - d {
                for r in 0..g.len() - 1 {
                    g[r] = 0.5 * (g[r] - g[r + 1]);
                }
                g.truncate(g.len() - 1);
            }
        }
        debug_assert_eq!(g.len(), 1);
        if !g[0].is_finite() {
            return Err(Error::InvalidInput(format!("non-finite eigenvalue at degree {k}")));
        }
        if neural {
            debug_assert!(
                g[0] >= -1e-9 * phi_one.abs().max(1.0),
                "negative eigenvalue {} for neural kernel at degree {k}",
                g[0]
            );
        }
        mu.push(g[0]);
    }
    Ok(CubeSpectrum { d, mu, phi_one })
}

/// Closed-form eigenvalue of Φ(t) = exp(t/σ²): the analytic oracle.
pub fn mu_exp_closed(sigma_sq: f64, d: usize, k: usize) -> Result<f64> {
    if !(sigma_sq > 0.0) {
        return Err(Error::InvalidInput(format!("sigma_sq must be positive, got {sigma_sq}")));
    }
    if k > d || d < 1 {
        return Err(Error::InvalidInput(format!("indices out of range: d={d} k={k}")));
    }
    let x = 2.0 / (d as f64 * sigma_sq); // Δ/σ²
    // log space so huge d and tiny factors do not underflow prematurely
    let ln_minus = (-(-x).exp_m1()).ln(); // ln(1 - e^{-x})
    let ln_plus = (1.0 + (-x).exp()).ln();
    let ln_mu = -(d as f64) * std::f64::consts::LN_2
        + k as f64 * ln_minus
        + (d - k) as f64 * ln_plus
        + 1.0 / sigma_sq;
    Ok(ln_mu.exp())
}

/// Binomial coefficient as f64 (exact for small args, ~1e-15 relative
/// otherwise; fine for d <= 512 weights).
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0f64;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Degree-k fractional variances binom(d,k) μ_k / Σ_i binom(d,i) μ_i.
pub fn fractional_variance(s: &CubeSpectrum) -> Result<Vec<f64>> {
    let weighted: Vec<f64> = s
        .mu
        .iter()
        .enumerate()
        .map(|(k, m)| binomial_f64(s.d, k) * m)
        .collect();
    let trace: f64 = weighted.iter().sum();
    if !(trace > 0.0) {
        return Err(Error::InvalidInput(format!("kernel trace must be positive, got {trace}")));
    }
    Ok(weighted.iter().map(|w| w / trace).collect())
}

/// Φ at Hamming distance r, reconstructed from the spectrum:
/// Φ((d/2 - r)Δ) = Σ_k C^{d-r,r}_k μ_k.
pub fn reconstruct_phi(s: &CubeSpectrum, r: usize) -> Result<f64> {
    if r > s.d {
        return Err(Error::InvalidInput(format!("distance {r} > dimension {}", s.d)));
    }
    let row = c_coef_row(s.d, r)?;
    Ok(row
        .iter()
        .zip(&s.mu)
        .map(|(c, m)| c.to_f64().unwrap_or(f64::NAN) * m)
        .sum())
}

impl CubeSpectrum {
    /// Σ_k binom(d,k) μ_k, which equals Φ(1) for exact spectra.
    pub fn trace(&self) -> f64 {
        self.mu
            .iter()
            .enumerate()
            .map(|(k, m)| binomial_f64(self.d, k) * m)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Activation, KernelKind};
    use approx::assert_relative_eq;
    use num_traits::FromPrimitive;

    #[test]
    fn c_coef_constant_term_is_one() {
        for (d, k) in [(1, 0), (5, 2), (9, 9), (12, 0)] {
            assert_eq!(c_coef(d, k, 0).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn c_coef_d2_k1() {
        // (1-x)(1+x) = 1 - x^2
        let row = c_coef_row(2, 1).unwrap();
        let want = [1i64, 0, -1];
        for (c, w) in row.iter().zip(want) {
            assert_eq!(*c, BigInt::from_i64(w).unwrap());
        }
    }

    #[test]
    fn c_coef_full_difference() {
        // C^{0,k}_r = (-1)^r binom(k,r)
        let k = 6;
        let row = c_coef_row(k, k).unwrap();
        for r in 0..=k {
            let want = BigInt::from_f64(binomial_f64(k, r)).unwrap()
                * if r % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(row[r], want);
        }
    }

    #[test]
    fn c_coef_out_of_range() {
        assert!(c_coef(3, 4, 0).is_err());
        assert!(c_coef(3, 1, 4).is_err());
    }

    #[test]
    fn mu_reference_two_point_cube() {
        let grid = PhiGrid::sample(|t| 0.3 + 1.2 * t, 1).unwrap();
        let (p1, pm1) = (grid.values[0], grid.values[1]);
        assert_relative_eq!(mu_reference(&grid, 0).unwrap(), (p1 + pm1) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(mu_reference(&grid, 1).unwrap(), (p1 - pm1) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn mu_reference_linear_kernel() {
        for d in [2, 5, 9] {
            let grid = PhiGrid::sample(|t| t, d).unwrap();
            for k in 0..=d {
                let want = if k == 1 { 1.0 / d as f64 } else { 0.0 };
                assert_relative_eq!(mu_reference(&grid, k).unwrap(), want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn mu_reference_exp_brute_force() {
        let grid = PhiGrid::sample(f64::exp, 2).unwrap();
        let e = std::f64::consts::E;
        assert_relative_eq!(
            mu_reference(&grid, 1).unwrap(),
            (e - 1.0 / e) / 4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn spectrum_of_constant() {
        let s = cube_spectrum(|_| 3.25, 9).unwrap();
        assert_relative_eq!(s.mu[0], 3.25, epsilon = 1e-14);
        for k in 1..=9 {
            assert!(s.mu[k].abs() < 1e-14);
        }
    }

    #[test]
    fn spectrum_matches_exp_closed_form() {
        for d in [2usize, 8, 16] {
            for &s2 in &[0.5, 1.0, 4.0] {
                let s = cube_spectrum(|t| (t / s2).exp(), d).unwrap();
                for k in 0..=d {
                    let want = mu_exp_closed(s2, d, k).unwrap();
                    assert_relative_eq!(s.mu[k], want, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn mu_exp_constant_limit() {
        let v = mu_exp_closed(1e8, 6, 0).unwrap();
        assert!((v - 1.0).abs() < 1e-7);
    }

    #[test]
    fn mu_exp_trace_identity() {
        let trace: f64 = (0..=4)
            .map(|k| binomial_f64(4, k) * mu_exp_closed(1.0, 4, k).unwrap())
            .sum();
        assert_relative_eq!(trace, std::f64::consts::E, max_relative = 1e-12);
    }

    #[test]
    fn spectrum_agrees_with_reference_random_configs() {
        let d = 12;
        for (i, cfg) in neural_configs().into_iter().enumerate() {
            let phi = |t: f64| phi_eval(&cfg, t, 1.0, 1.0).unwrap();
            let s = cube_spectrum(phi, d).unwrap();
            let grid = PhiGrid::sample(phi, d).unwrap();
            for k in 0..=d {
                let want = mu_reference(&grid, k).unwrap();
                // enumeration roundoff floor for exactly-zero eigenvalues
                let scale = want.abs().max(s.phi_one * 1e-8);
                assert!(
                    (s.mu[k] - want).abs() / scale < 1e-9,
                    "config {i} degree {k}: stable {} vs reference {want}",
                    s.mu[k]
                );
            }
        }
    }

    #[test]
    fn trace_identity_and_nonnegativity() {
        for d in [7usize, 32] {
            for cfg in neural_configs() {
                let s = cube_spectrum_config(&cfg, d).unwrap();
                assert_relative_eq!(s.trace(), s.phi_one, max_relative = 1e-8);
                for m in &s.mu {
                    assert!(*m >= -1e-10 * s.phi_one);
                }
            }
        }
    }

    #[test]
    fn weak_spectral_simplicity_bias() {
        for d in [7usize, 32, 128] {
            for cfg in neural_configs() {
                let s = cube_spectrum_config(&cfg, d).unwrap();
                let slack = 1e-10 * s.phi_one;
                for k in 0..=d.saturating_sub(2) {
                    assert!(
                        s.mu[k] + slack >= s.mu[k + 2],
                        "{cfg:?} d={d}: mu_{k} < mu_{}",
                        k + 2
                    );
                }
            }
        }
    }

    #[test]
    fn fractional_variance_basics() {
        let s = cube_spectrum(|t| t, 8).unwrap();
        let fv = fractional_variance(&s).unwrap();
        assert_relative_eq!(fv[1], 1.0, epsilon = 1e-10);
        assert!(fv.iter().enumerate().filter(|(k, _)| *k != 1).all(|(_, v)| v.abs() < 1e-10));
        let total: f64 = fv.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fig1b_relu_constant_dominates() {
        let cfg = KernelConfig {
            depth: 3,
            activation: Activation::Relu,
            weight_var: 2.0,
            bias_var: 2.0,
            kind: KernelKind::Ck,
        };
        let s = cube_spectrum_config(&cfg, 7).unwrap();
        let fv = fractional_variance(&s).unwrap();
        assert!(fv[0] > 0.8, "degree-0 fraction {}", fv[0]);
    }

    #[test]
    fn fig1b_erf_even_degrees_vanish() {
        for depth in [2usize, 5] {
            let cfg = KernelConfig {
                depth,
                activation: Activation::Erf,
                weight_var: 3.0,
                bias_var: 0.0,
                kind: KernelKind::Ck,
            };
            let s = cube_spectrum_config(&cfg, 7).unwrap();
            let fv = fractional_variance(&s).unwrap();
            for k in (0..=7).step_by(2) {
                assert!(fv[k].abs() < 1e-10, "even degree {k} fraction {}", fv[k]);
            }
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let cfg = KernelConfig {
            depth: 3,
            activation: Activation::Relu,
            weight_var: 2.0,
            bias_var: 0.5,
            kind: KernelKind::Ntk,
        };
        let d = 64;
        let phi = |t: f64| phi_eval(&cfg, t, 1.0, 1.0).unwrap();
        let grid = PhiGrid::sample(phi, d).unwrap();
        let s = cube_spectrum_from_grid(&grid, true).unwrap();
        for r in 0..=d {
            let got = reconstruct_phi(&s, r).unwrap();
            assert!(
                (got - grid.values[r]).abs() / grid.values[r].abs().max(1e-12) < 1e-6,
                "r={r}: {got} vs {}",
                grid.values[r]
            );
        }
        // trace identity at distance 0
        assert_relative_eq!(reconstruct_phi(&s, 0).unwrap(), s.phi_one, max_relative = 1e-8);
    }

    #[test]
    fn c_matrix_squares_to_power_of_two() {
        for d in [3usize, 8, 14] {
            let rows: Vec<Vec<BigInt>> = (0..=d).map(|r| c_coef_row(d, r).unwrap()).collect();
            let two_d = BigInt::one() << d;
            for r in 0..=d {
                for c in 0..=d {
                    let mut acc = BigInt::zero();
                    for j in 0..=d {
                        acc += &rows[r][j] * &rows[j][c];
                    }
                    let want = if r == c { two_d.clone() } else { BigInt::zero() };
                    assert_eq!(acc, want, "d={d} entry ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn asymptotic_mu_approaches_derivatives() {
        use crate::kernel::phi_jet;
        for (act, sw, sb) in [(Activation::Relu, 2.0, 0.0), (Activation::Erf, 1.0, 0.0)] {
            let cfg = KernelConfig {
                depth: 2,
                activation: act,
                weight_var: sw,
                bias_var: sb,
                kind: KernelKind::Ck,
            };
            let jet = phi_jet(&cfg, 8).unwrap();
            for k in 0..=3usize {
                let deriv = jet.coeffs()[k] * (1..=k).product::<usize>() as f64;
                let err = |d: usize| {
                    let s = cube_spectrum_config(&cfg, d).unwrap();
                    ((d as f64).powi(k as i32) * s.mu[k] - deriv).abs()
                };
                // slack for degrees the stable algorithm gets exactly
                assert!(err(256) < err(32) + 1e-12, "{act:?} degree {k}");
            }
        }
    }

    fn neural_configs() -> Vec<KernelConfig> {
        let mut out = Vec::new();
        for kind in [KernelKind::Ck, KernelKind::Ntk] {
            for (act, sw, sb) in [
                (Activation::Relu, 2.0, 0.0),
                (Activation::Relu, 1.5, 1.0),
                (Activation::Erf, 2.0, 0.1),
                (Activation::Erf, 4.0, 0.0),
            ] {
                for depth in [1usize, 2, 3] {
                    out.push(KernelConfig { depth, activation: act, weight_var: sw, bias_var: sb, kind });
                }
            }
        }
        out
    }
}

