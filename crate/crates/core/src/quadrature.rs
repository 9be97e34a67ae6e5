//! Golub–Welsch construction of Gauss rules from three-term recurrences.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix
//! and weights are the total mass times the squared first components of
//! its eigenvectors. The eigenproblem is solved with the implicit-shift
//! QL iteration, accumulating only the first row of the rotation product,
//! which is accurate to a few ulps for these well-conditioned matrices.

use crate::error::{Error, Result};

/// Nodes and weights of the Gauss rule whose Jacobi matrix has diagonal
/// `diag` and off-diagonal `offdiag` (length one less), scaled so the
/// weights sum to `total_mass`. Returned sorted by node.
pub fn gauss_rule_from_jacobi(
    diag: &[f64],
    offdiag: &[f64],
    total_mass: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 || offdiag.len() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "jacobi matrix needs {} off-diagonal entries for size {n}, got {}",
            n.saturating_sub(1),
            offdiag.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    // implicit QL with Wilkinson shifts (EISPACK tql2 restricted to the
    // first eigenvector row)
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NumericalInconsistency(
                    "QL iteration failed to converge while building a Gauss rule".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut pairs: Vec<(f64, f64)> = d
        .into_iter()
        .zip(z)
        .map(|(node, z0)| (node, total_mass * z0 * z0))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(pairs.into_iter().unzip())
}
