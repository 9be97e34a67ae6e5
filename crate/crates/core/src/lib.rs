//! Closed-form conjugate kernels (CK) and neural tangent kernels (NTK) of
//! multilayer perceptrons, and their spectra as integral operators over
//! the boolean cube {±1}^d, the sphere √d·S^{d-1}, and the standard
//! Gaussian.
//!
//! - [`kernel`]: dual activations and the layer recursion giving Φ(t,q,q'),
//!   pointwise and as Taylor jets.
//! - [`jet`]: truncated Taylor-series arithmetic backing the jets.
//! - [`boolcube`]: exact eigenvalues μ_k over {±1}^d, fractional variances,
//!   kernel reconstruction, and the exp-kernel analytic oracle.
//! - [`sphere`]: harmonic eigenvalues a_l via Gauss–Jacobi quadrature
//!   against Gegenbauer polynomials or via the Taylor series.
//! - [`gaussian`]: spectra over N(0, I_d) through the radially averaged
//!   kernel, exact in the homogeneous case.
//! - [`dynamics`]: kernel gradient descent, GP posterior means and samples,
//!   and theoretical/empirical maximum learning rates.
//! - [`netsample`]: finite-width Monte-Carlo census of sign-thresholded
//!   random networks.

pub mod boolcube;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod jet;
pub mod kernel;
pub mod netsample;
pub mod quadrature;
pub mod rng;
pub mod sphere;

pub use error::{Error, Result};
pub use kernel::{Activation, KernelConfig, KernelKind};
