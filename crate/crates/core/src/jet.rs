//! Truncated univariate Taylor-series ("jet") arithmetic.
//!
//! A [`Jet`] holds coefficients `c_0..=c_N` of a function's Taylor expansion
//! at 0, `c_n = f^(n)(0)/n!`. The kernel recursion is run in this ring to
//! obtain derivatives of the Φ function at `t = 0` to arbitrary order.

use crate::error::{Error, Result};

/// Truncated Taylor coefficients of a univariate function at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

/// Elementary function chains supported on jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Sqrt,
    Recip,
    Exp,
    Arcsin,
    Arccos,
}

impl Jet {
    /// Jet with the given coefficients; order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("jet needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite jet coefficient".into()));
        }
        Ok(Jet { coeffs })
    }

    /// The constant function `c` as a jet of the given order.
    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Jet { coeffs }
    }

    /// The identity `t` as a jet of the given order (order >= 1).
    pub fn variable(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    fn check_order(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::InvalidInput(format!(
                "jet order mismatch: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet { coeffs })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet { coeffs })
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Adds a constant to the order-0 coefficient.
    pub fn shift(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_order(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                coeffs[i + j] += a * other.coeffs[j];
            }
        }
        Ok(Jet { coeffs })
    }

    /// Jet of the derivative, one order shorter conceptually but padded with
    /// a trailing zero so orders stay aligned.
    fn derivative(&self) -> Jet {
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for k in 1..n {
            coeffs[k - 1] = k as f64 * self.coeffs[k];
        }
        Jet { coeffs }
    }

    /// Applies an elementary function chain to this jet.
    pub fn elementary(&self, f: Elementary) -> Result<Jet> {
        match f {
            Elementary::Sqrt => self.sqrt(),
            Elementary::Recip => self.recip(),
            Elementary::Exp => self.exp(),
            Elementary::Arcsin => self.arcsin(),
            Elementary::Arccos => self.arccos(),
        }
    }

    /// sqrt(u) via the direct coefficient recurrence; requires `u_0 > 0`.
    pub fn sqrt(&self) -> Result<Jet> {
        let u0 = self.coeffs[0];
        if u0 <= 0.0 {
            return Err(Error::Domain(format!("sqrt of jet with center {u0}")));
        }
        let n = self.coeffs.len();
        let mut s = vec![0.0; n];
        s[0] = u0.sqrt();
        for k in 1..n {
            let mut conv = 0.0;
            for j in 1..k {
                conv += s[j] * s[k - j];
            }
            s[k] = (self.coeffs[k] - conv) / (2.0 * s[0]);
        }
        Ok(Jet { coeffs: s })
    }

    /// 1/u via the direct coefficient recurrence; requires `u_0 != 0`.
    pub fn recip(&self) -> Result<Jet> {
        let u0 = self.coeffs[0];
        if u0 == 0.0 {
            return Err(Error::Domain("recip of jet with center 0".into()));
        }
        let n = self.coeffs.len();
        let mut r = vec![0.0; n];
        r[0] = 1.0 / u0;
        for k in 1..n {
            let mut conv = 0.0;
            for j in 1..=k {
                conv += self.coeffs[j] * r[k - j];
            }
            r[k] = -conv / u0;
        }
        Ok(Jet { coeffs: r })
    }

    /// exp(u) via the derivative-integration recurrence.
    pub fn exp(&self) -> Result<Jet> {
        let n = self.coeffs.len();
        let mut e = vec![0.0; n];
        e[0] = self.coeffs[0].exp();
        for k in 1..n {
            // e' = u' e  =>  k e_k = sum_{j=1}^{k} j u_j e_{k-j}
            let mut conv = 0.0;
            for j in 1..=k {
                conv += j as f64 * self.coeffs[j] * e[k - j];
            }
            e[k] = conv / k as f64;
        }
        Ok(Jet { coeffs: e })
    }

    /// arcsin(u): evaluate the derivative chain 1/sqrt(1-u^2) as a jet and
    /// integrate coefficient-wise. Requires `|u_0| < 1`.
    pub fn arcsin(&self) -> Result<Jet> {
        let u0 = self.coeffs[0];
        if u0.abs() >= 1.0 {
            return Err(Error::Domain(format!("arcsin of jet with center {u0}")));
        }
        let w = self.integrand_inv_sqrt_one_minus_sq()?;
        let du = self.derivative();
        let prod = w.mul(&du)?;
        let n = self.coeffs.len();
        let mut a = vec![0.0; n];
        a[0] = u0.asin();
        for k in 1..n {
            a[k] = prod.coeffs[k - 1] / k as f64;
        }
        Ok(Jet { coeffs: a })
    }

    /// arccos(u) = π/2 - arcsin(u).
    pub fn arccos(&self) -> Result<Jet> {
        let a = self.arcsin()?;
        let mut coeffs: Vec<f64> = a.coeffs.iter().map(|c| -c).collect();
        coeffs[0] = self.coeffs[0].acos();
        Ok(Jet { coeffs })
    }

    // 1/sqrt(1 - u^2)
    fn integrand_inv_sqrt_one_minus_sq(&self) -> Result<Jet> {
        let sq = self.mul(self)?;
        let one_minus = sq.scale(-1.0).shift(1.0);
        one_minus.sqrt()?.recip()
    }

    /// Sum of coefficients, i.e. the truncated series evaluated at 1.
    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Evaluates the truncated polynomial at `t` (Horner).
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn jet(v: &[f64]) -> Jet {
        Jet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mul_t_times_t() {
        let t = jet(&[0.0, 1.0, 0.0]);
        assert_eq!(t.mul(&t).unwrap().coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn add_basic() {
        let a = jet(&[1.0, 0.0]);
        let b = jet(&[0.0, 1.0]);
        assert_eq!(a.add(&b).unwrap().coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn mul_truncates() {
        // (1 + t + t^2)(1 - t) = 1 - t^3 = 1 mod t^3
        let a = jet(&[1.0, 1.0, 1.0]);
        let b = jet(&[1.0, -1.0, 0.0]);
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn order_mismatch_rejected() {
        let a = jet(&[1.0, 2.0]);
        let b = jet(&[1.0]);
        assert!(a.add(&b).is_err());
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn sqrt_of_one_minus_t_sq() {
        let u = jet(&[1.0, 0.0, -1.0]);
        let s = u.sqrt().unwrap();
        assert_relative_eq!(s.coeffs()[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.coeffs()[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(s.coeffs()[2], -0.5, epsilon = 1e-14);
    }

    #[test]
    fn arcsin_series() {
        let t = jet(&[0.0, 1.0, 0.0, 0.0]);
        let a = t.arcsin().unwrap();
        assert_relative_eq!(a.coeffs()[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(a.coeffs()[1], 1.0, epsilon = 1e-14);
        assert_relative_eq!(a.coeffs()[2], 0.0, epsilon = 1e-14);
        assert_relative_eq!(a.coeffs()[3], 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn exp_series() {
        let t = jet(&[0.0, 1.0, 0.0, 0.0, 0.0]);
        let e = t.exp().unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (c, x) in e.coeffs().iter().zip(expect) {
            assert_relative_eq!(*c, x, epsilon = 1e-14);
        }
    }

    #[test]
    fn domain_violations_are_errors() {
        assert!(jet(&[0.0, 1.0]).sqrt().is_err());
        assert!(jet(&[0.0, 1.0]).recip().is_err());
        assert!(jet(&[1.0, 1.0]).arcsin().is_err());
        assert!(jet(&[-1.5, 1.0]).arccos().is_err());
    }

    /// Scalar finite-difference oracle for f∘u at order <= 4
    /// (central stencils, twice-Richardson-extrapolated to O(h^6)).
    fn fd_coeffs(f: impl Fn(f64) -> f64, u: &Jet, order: usize) -> Vec<f64> {
        let g = |t: f64| f(u.eval(t));
        let d = |n: usize, h: f64| -> f64 {
            match n {
                0 => g(0.0),
                1 => (g(h) - g(-h)) / (2.0 * h),
                2 => (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h),
                3 => (g(2.0 * h) - 2.0 * g(h) + 2.0 * g(-h) - g(-2.0 * h)) / (2.0 * h * h * h),
                4 => {
                    (g(2.0 * h) - 4.0 * g(h) + 6.0 * g(0.0) - 4.0 * g(-h) + g(-2.0 * h))
                        / (h * h * h * h)
                }
                _ => unreachable!(),
            }
        };
        let h = 0.04;
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let richardson = |n: usize, h: f64| (4.0 * d(n, h / 2.0) - d(n, h)) / 3.0;
        (0..=order)
            .map(|n| (16.0 * richardson(n, h / 2.0) - richardson(n, h)) / 15.0 / fact[n])
            .collect()
    }

    #[test]
    fn elementary_matches_scalar_finite_differences() {
        let centers = [0.3, -0.2, 0.45, 0.1, -0.4];
        for (i, &c0) in centers.iter().enumerate() {
            let u = jet(&[c0, 0.7, -0.3 + 0.1 * i as f64, 0.2, 0.05]);
            let cases: Vec<(Elementary, Box<dyn Fn(f64) -> f64>)> = vec![
                (Elementary::Exp, Box::new(f64::exp)),
                (Elementary::Arcsin, Box::new(f64::asin)),
                (Elementary::Arccos, Box::new(f64::acos)),
            ];
            for (el, f) in cases {
                let got = u.elementary(el).unwrap();
                let want = fd_coeffs(&f, &u, 4);
                for n in 0..=4 {
                    let w = want[n];
                    let scale = w.abs().max(1e-3);
                    assert!(
                        (got.coeffs()[n] - w).abs() / scale < 1e-5,
                        "{el:?} order {n}: got {} want {w}",
                        got.coeffs()[n]
                    );
                }
            }
            // sqrt/recip need positive centers
            let up = jet(&[1.0 + c0.abs(), 0.7, -0.3, 0.2, 0.05]);
            for (el, f) in [
                (Elementary::Sqrt, f64::sqrt as fn(f64) -> f64),
                (Elementary::Recip, (|x: f64| 1.0 / x) as fn(f64) -> f64),
            ] {
                let got = up.elementary(el).unwrap();
                let want = fd_coeffs(f, &up, 4);
                for n in 0..=4 {
                    let w = want[n];
                    assert!(
                        (got.coeffs()[n] - w).abs() / w.abs().max(1e-3) < 1e-5,
                        "{el:?} order {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn arcsin_derivative_identity() {
        // d/dt arcsin(u) == u' / sqrt(1 - u^2) as jets
        for seed in 0..5u64 {
            let s = seed as f64;
            let u = jet(&[0.1 * s - 0.25, 0.6, -0.2, 0.3, 0.1, -0.05]);
            let a = u.arcsin().unwrap();
            let lhs = a.derivative();
            let rhs = u
                .derivative()
                .mul(&u.integrand_inv_sqrt_one_minus_sq().unwrap())
                .unwrap();
            // last derivative coefficient is truncation-lost; skip it
            for n in 0..u.order() {
                assert!(
                    (lhs.coeffs()[n] - rhs.coeffs()[n]).abs()
                        < 1e-10 * rhs.coeffs()[n].abs().max(1.0),
                    "order {n}: {} vs {}",
                    lhs.coeffs()[n],
                    rhs.coeffs()[n]
                );
            }
        }
    }

    fn arb_jet(order: usize) -> impl Strategy<Value = Jet> {
        prop::collection::vec(-2.0f64..2.0, order + 1..=order + 1)
            .prop_map(|v| Jet::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn mul_commutes(a in arb_jet(6), b in arb_jet(6)) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }

        #[test]
        fn mul_associates(a in arb_jet(6), b in arb_jet(6), c in arb_jet(6)) {
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            for (x, y) in l.coeffs().iter().zip(r.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }

        #[test]
        fn mul_distributes(a in arb_jet(6), b in arb_jet(6), c in arb_jet(6)) {
            let l = a.mul(&b.add(&c).unwrap()).unwrap();
            let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            for (x, y) in l.coeffs().iter().zip(r.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
    }
}
