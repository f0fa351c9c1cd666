//! One-dimensional Gauss rules (Legendre and Jacobi) via Golub–Welsch.
//!
//! The eigensolver is a self-contained implicit-QL iteration on the
//! symmetric tridiagonal Jacobi matrix that also accumulates the first
//! eigenvector components, which is all the weights need.

use crate::error::{Error, Result};
use crate::specfun::gamma_positive;

/// Nodes and weights of a 1-D Gauss rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrate `f` over `[a, b]` (affinely mapped from the reference
    /// interval; the rule's weight function maps along).
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(half * x + mid))
            .sum::<f64>()
            * half
    }
}

/// Gauss–Legendre rule of `n` points: weight 1 on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Jacobi rule of `n` points: weight `(1-x)^alpha (1+x)^beta` on
/// `[-1, 1]`, `alpha, beta > -1`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::Domain("quadrature order must be >= 1".into()));
    }
    if !(alpha.is_finite() && alpha > -1.0 && beta.is_finite() && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Jacobi exponents must be > -1, got alpha={alpha}, beta={beta}"
        )));
    }
    // total mass of the weight: 2^(a+b+1) B(a+1, b+1)
    let mu0 = 2f64.powf(alpha + beta + 1.0) * gamma_positive(alpha + 1.0)
        * gamma_positive(beta + 1.0)
        / gamma_positive(alpha + beta + 2.0);

    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let ab = alpha + beta;
    diag[0] = if ab + 2.0 == 0.0 { 0.0 } else { (beta - alpha) / (ab + 2.0) };
    for i in 1..n {
        let i_f = i as f64;
        let denom = 2.0 * i_f + ab;
        diag[i] = (beta * beta - alpha * alpha) / (denom * (denom + 2.0));
        off[i - 1] = 2.0 / denom
            * (i_f * (i_f + alpha) * (i_f + beta) * (i_f + ab)
                / ((denom + 1.0) * (denom - 1.0)))
                .sqrt();
    }
    // degenerate n=1 entry of the recurrence (0/0 above when a+b = 0 handled)
    if n >= 1 && ab + 2.0 != 0.0 {
        diag[0] = (beta - alpha) / (ab + 2.0);
    }

    let mut z = vec![0.0; n];
    z[0] = 1.0;
    imtqlx(&mut diag, &mut off, &mut z)?;

    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(z.into_iter().map(|v| mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // symmetric rules should have an exactly-zero middle node
    if alpha == beta && n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(GaussRule { nodes, weights })
}

/// Implicit-QL diagonalization of a symmetric tridiagonal matrix, tracking
/// the first component of each eigenvector in `z`.
fn imtqlx(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= f64::EPSILON * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Construction(
                    "tridiagonal QL iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                if f.abs() >= g.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
