//! Shared oracles for the integration tests. Everything here is an
//! independent route: no code below calls into the evaluation paths it is
//! used to check.

#![allow(dead_code)]

/// Normalized Bessel via Miller's backward recurrence with the classical
/// normalization `(z/2)^nu = sum_t (nu+2t) Gamma(nu+t)/t! J_(nu+2t)(z)`,
/// which gives `j_nu(z) = Gamma(nu+1) trial_0 / norm` directly. Stable for
/// `z > 0`, `nu > -1`; roughly 1e-14 relative.
pub fn bessel_miller(alpha: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    let za = z.abs();
    let start = (za as usize + alpha.abs() as usize + 60).max(80);
    let mut values = vec![0.0f64; start + 1];
    let mut jp = 0.0f64;
    let mut j = 1e-300f64;
    values[start] = j;
    let mut m = start;
    while m > 0 {
        let nu = alpha + m as f64;
        let jm = (2.0 * nu / za) * j - jp;
        jp = j;
        j = jm;
        m -= 1;
        values[m] = j;
        if j.abs() > 1e250 {
            let s = 1.0 / j.abs();
            for v in values[m..].iter_mut() {
                *v *= s;
            }
            j *= s;
            jp *= s;
        }
    }
    let mut norm = 0.0f64;
    for t in 0..=(start / 2) {
        let tf = t as f64;
        // c_t = (alpha + 2t) Gamma(alpha + t)/t!; c_0 = Gamma(alpha + 1)
        let c = if t == 0 {
            lgamma(alpha + 1.0).exp()
        } else {
            (alpha + 2.0 * tf) * (lgamma(alpha + tf) - lgamma(tf + 1.0)).exp()
        };
        norm += c * values[2 * t];
    }
    lgamma(alpha + 1.0).exp() * values[0] / norm
}

/// Log-gamma via the Stirling series with argument shift; ~1e-13 for x > 0.
pub fn lgamma(mut x: f64) -> f64 {
    let mut shift = 0.0f64;
    while x < 12.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0;
    shift + 0.5 * ((2.0 * std::f64::consts::PI).ln() - x.ln()) + x * (x.ln() - 1.0) + series
}

pub fn gamma(x: f64) -> f64 {
    lgamma(x).exp()
}

/// Poisson-integral representation:
/// `j_alpha(z) = c_alpha int_{-1}^1 (1-t^2)^(alpha-1/2) cos(zt) dt` for
/// `alpha > -1/2`. Substituting `t = sin u` makes the integrand smooth and
/// composite Simpson is then oracle-grade.
pub fn bessel_poisson(alpha: f64, z: f64, nodes: usize) -> f64 {
    assert!(alpha > -0.5);
    let n = nodes.max(2000);
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let f = |u: f64| -> f64 {
        let c = u.cos();
        c.powf(2.0 * alpha) * (z * u.sin()).cos()
    };
    let mut acc = f(0.0) + f(std::f64::consts::FRAC_PI_2);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = 2.0 * acc * h / 3.0;
    let c_alpha = gamma(alpha + 1.0) / (gamma(alpha + 0.5) * std::f64::consts::PI.sqrt());
    c_alpha * integral
}

/// Least-squares slope for oracle-side fits.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
