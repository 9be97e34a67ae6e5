//! Closed-form CK and NTK Φ-functions of MLPs.
//!
//! A depth-`L` MLP with activation φ and variances (σ_w², σ_b²) induces a
//! conjugate kernel Σ^L and a neural tangent kernel Θ^L via the dual
//! activation V_φ. Both take the form `K(x, y) = Φ(t, q, q')` with
//! `t = ⟨x,y⟩/‖x‖‖y‖`, `q = ‖x‖²/d`, `q' = ‖y‖²/d`. This module evaluates
//! Φ pointwise and as a truncated Taylor jet at `t = 0`.

use crate::error::{Error, Result};
use crate::jet::Jet;

const COSINE_CLAMP_TOL: f64 = 1e-12;

/// Activation function of the MLP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    Erf,
    /// φ(x) = exp(x/σ); CK only. Exists as the analytic exp-kernel oracle.
    Exp { sigma: f64 },
}

impl Activation {
    pub fn validate(&self) -> Result<()> {
        if let Activation::Exp { sigma } = self {
            if !(*sigma > 0.0) {
                return Err(Error::InvalidInput(format!("exp activation needs sigma > 0, got {sigma}")));
            }
        }
        Ok(())
    }
}

/// CK (last-layer training) or NTK (all-layer training).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Ck,
    Ntk,
}

/// An MLP architecture plus kernel kind; the generator of every Φ.
///
/// `depth` counts applications of the layer map, so depth 1 is the linear
/// kernel Σ¹ and "H hidden layers" corresponds to `depth = H + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub depth: usize,
    pub activation: Activation,
    pub weight_var: f64,
    pub bias_var: f64,
    pub kind: KernelKind,
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::InvalidInput("depth must be >= 1".into()));
        }
        if !(self.weight_var > 0.0) {
            return Err(Error::InvalidInput(format!("weight_var must be > 0, got {}", self.weight_var)));
        }
        if !(self.bias_var >= 0.0) {
            return Err(Error::InvalidInput(format!("bias_var must be >= 0, got {}", self.bias_var)));
        }
        self.activation.validate()?;
        if matches!(self.activation, Activation::Exp { .. }) && self.kind == KernelKind::Ntk {
            return Err(Error::Unsupported("exp activation has no NTK closed form".into()));
        }
        Ok(())
    }
}

/// A 2x2 kernel restriction: diagonal entries and the off-diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEntryTriple {
    pub k_xx: f64,
    pub k_xy: f64,
    pub k_yy: f64,
}

impl KernelEntryTriple {
    pub fn new(k_xx: f64, k_xy: f64, k_yy: f64) -> Self {
        KernelEntryTriple { k_xx, k_xy, k_yy }
    }

    /// Cosine `k_xy / sqrt(k_xx k_yy)`, clamped to [-1, 1] against roundoff.
    /// Beyond the clamping tolerance the triple is non-PSD and rejected.
    fn cosine(&self) -> Result<f64> {
        if self.k_xx < 0.0 || self.k_yy < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative diagonal in kernel triple ({}, {}, {})",
                self.k_xx, self.k_xy, self.k_yy
            )));
        }
        let denom = (self.k_xx * self.k_yy).sqrt();
        let c = self.k_xy / denom;
        if c.abs() > 1.0 + COSINE_CLAMP_TOL {
            return Err(Error::InvalidInput(format!(
                "non-PSD kernel triple: |cosine| = {} > 1",
                c.abs()
            )));
        }
        Ok(c.clamp(-1.0, 1.0))
    }
}

/// Dual activation V_φ applied to a 2x2 kernel restriction.
pub fn v_phi(act: Activation, e: KernelEntryTriple) -> Result<f64> {
    act.validate()?;
    match act {
        Activation::Relu => {
            if e.k_xx == 0.0 || e.k_yy == 0.0 {
                // continuity limit
                return Ok(0.0);
            }
            let c = e.cosine()?;
            let norm = (e.k_xx * e.k_yy).sqrt();
            Ok(((1.0 - c * c).max(0.0).sqrt() + (std::f64::consts::PI - c.acos()) * c) * norm
                / (2.0 * std::f64::consts::PI))
        }
        Activation::Erf => {
            if e.k_xx == 0.0 || e.k_yy == 0.0 {
                return Ok(0.0);
            }
            e.cosine()?; // PSD check
            let denom = ((e.k_xx + 0.5) * (e.k_yy + 0.5)).sqrt();
            let arg = (e.k_xy / denom).clamp(-1.0, 1.0);
            Ok(2.0 / std::f64::consts::PI * arg.asin())
        }
        Activation::Exp { sigma } => {
            e.cosine()?;
            Ok(((e.k_xx + 2.0 * e.k_xy + e.k_yy) / (2.0 * sigma * sigma)).exp())
        }
    }
}

/// Dual activation of the derivative, V_φ'; relu and erf only.
pub fn v_phi_prime(act: Activation, e: KernelEntryTriple) -> Result<f64> {
    match act {
        Activation::Relu => {
            let c = e.cosine()?;
            Ok((std::f64::consts::PI - c.acos()) / (2.0 * std::f64::consts::PI))
        }
        Activation::Erf => {
            e.cosine()?;
            let disc = (1.0 + 2.0 * e.k_xx) * (1.0 + 2.0 * e.k_yy) - 4.0 * e.k_xy * e.k_xy;
            if disc <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "degenerate erf derivative denominator: discriminant {disc}"
                )));
            }
            Ok(4.0 / (std::f64::consts::PI * disc.sqrt()))
        }
        Activation::Exp { .. } => Err(Error::Unsupported(
            "V_phi' is not defined for the exp activation".into(),
        )),
    }
}

/// Evaluates Φ(t, q, q2) by running the CK/NTK layer recursion.
pub fn phi_eval(cfg: &KernelConfig, t: f64, q: f64, q2: f64) -> Result<f64> {
    cfg.validate()?;
    if !(q > 0.0) || !(q2 > 0.0) {
        return Err(Error::InvalidInput(format!("norms q, q2 must be positive, got ({q}, {q2})")));
    }
    if t.abs() > 1.0 + COSINE_CLAMP_TOL {
        return Err(Error::InvalidInput(format!("|t| = {} > 1", t.abs())));
    }
    let t = t.clamp(-1.0, 1.0);
    let sw = cfg.weight_var;
    let sb = cfg.bias_var;

    // layer 1
    let mut s_xx = sw * q + sb;
    let mut s_yy = sw * q2 + sb;
    let mut s_xy = sw * t * (q * q2).sqrt() + sb;
    let mut th_xy = s_xy;

    for _ in 1..cfg.depth {
        let prev = KernelEntryTriple::new(s_xx, s_xy, s_yy);
        let n_xx = sw * v_phi(cfg.activation, KernelEntryTriple::new(s_xx, s_xx, s_xx))? + sb;
        let n_yy = sw * v_phi(cfg.activation, KernelEntryTriple::new(s_yy, s_yy, s_yy))? + sb;
        let n_xy = sw * v_phi(cfg.activation, prev)? + sb;
        if cfg.kind == KernelKind::Ntk {
            th_xy = n_xy + sw * th_xy * v_phi_prime(cfg.activation, prev)?;
        }
        s_xx = n_xx;
        s_yy = n_yy;
        s_xy = n_xy;
    }

    Ok(match cfg.kind {
        KernelKind::Ck => s_xy,
        KernelKind::Ntk => th_xy,
    })
}

/// Taylor jet of t ↦ Φ(t, 1, 1) at t = 0, to the given order.
pub fn phi_jet(cfg: &KernelConfig, order: usize) -> Result<Jet> {
    phi_jet_with_norms(cfg, order, 1.0, 1.0)
}

/// Taylor jet of t ↦ Φ(t, q, q2) at t = 0. The diagonal entries of the
/// layer recursion are t-independent scalars; only the off-diagonal entry
/// is carried as a jet.
pub fn phi_jet_with_norms(cfg: &KernelConfig, order: usize, q: f64, q2: f64) -> Result<Jet> {
    cfg.validate()?;
    if order < 1 {
        return Err(Error::InvalidInput("jet order must be >= 1".into()));
    }
    if !(q > 0.0) || !(q2 > 0.0) {
        return Err(Error::InvalidInput(format!("norms q, q2 must be positive, got ({q}, {q2})")));
    }
    let sw = cfg.weight_var;
    let sb = cfg.bias_var;

    let mut s_xx = sw * q + sb;
    let mut s_yy = sw * q2 + sb;
    let mut s_xy = Jet::variable(order).scale(sw * (q * q2).sqrt()).shift(sb);
    let mut th_xy = s_xy.clone();

    for _ in 1..cfg.depth {
        let norm = (s_xx * s_yy).sqrt();
        let c = s_xy.scale(1.0 / norm);
        let n_xx = sw * v_phi(cfg.activation, KernelEntryTriple::new(s_xx, s_xx, s_xx))? + sb;
        let n_yy = sw * v_phi(cfg.activation, KernelEntryTriple::new(s_yy, s_yy, s_yy))? + sb;
        let v = jet_v_phi(cfg.activation, &c, norm, s_xx, s_yy)?;
        let n_xy = v.scale(sw).shift(sb);
        if cfg.kind == KernelKind::Ntk {
            let vp = jet_v_phi_prime(cfg.activation, &c, s_xx, s_yy, &s_xy)?;
            th_xy = n_xy.add(&th_xy.mul(&vp)?.scale(sw))?;
        }
        s_xx = n_xx;
        s_yy = n_yy;
        s_xy = n_xy;
    }

    Ok(match cfg.kind {
        KernelKind::Ck => s_xy,
        KernelKind::Ntk => th_xy,
    })
}

// V_phi with the cosine entry as a jet; diagonals are scalars.
fn jet_v_phi(act: Activation, c: &Jet, norm: f64, s_xx: f64, s_yy: f64) -> Result<Jet> {
    match act {
        Activation::Relu => {
            // (sqrt(1-c^2) + (pi - arccos c) c) * norm / (2 pi)
            let one_minus = c.mul(c)?.scale(-1.0).shift(1.0);
            let root = one_minus.sqrt()?;
            let angle = c.arccos()?.scale(-1.0).shift(std::f64::consts::PI);
            root.add(&angle.mul(c)?)
                .map(|j| j.scale(norm / (2.0 * std::f64::consts::PI)))
        }
        Activation::Erf => {
            let denom = ((s_xx + 0.5) * (s_yy + 0.5)).sqrt();
            let arg = c.scale(norm / denom);
            arg.arcsin().map(|j| j.scale(2.0 / std::f64::consts::PI))
        }
        Activation::Exp { sigma } => {
            let s2 = sigma * sigma;
            c.scale(norm / s2).shift((s_xx + s_yy) / (2.0 * s2)).exp()
        }
    }
}

fn jet_v_phi_prime(act: Activation, c: &Jet, s_xx: f64, s_yy: f64, s_xy: &Jet) -> Result<Jet> {
    match act {
        Activation::Relu => {
            let angle = c.arccos()?.scale(-1.0).shift(std::f64::consts::PI);
            Ok(angle.scale(1.0 / (2.0 * std::f64::consts::PI)))
        }
        Activation::Erf => {
            let base = (1.0 + 2.0 * s_xx) * (1.0 + 2.0 * s_yy);
            let disc = s_xy.mul(s_xy)?.scale(-4.0).shift(base);
            let root = disc.sqrt()?;
            root.recip().map(|j| j.scale(4.0 / std::f64::consts::PI))
        }
        Activation::Exp { .. } => Err(Error::Unsupported(
            "V_phi' is not defined for the exp activation".into(),
        )),
    }
}
