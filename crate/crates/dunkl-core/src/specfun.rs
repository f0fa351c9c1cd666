//! Self-contained special functions: the normalized Bessel function
//! `j_alpha(z) = Gamma(alpha+1) (2/z)^alpha J_alpha(z)` and log-gamma.
//!
//! `j_alpha` is what the rank-1 Dunkl kernel is built from, so its accuracy
//! budget drives everything downstream. Two evaluation paths are used:
//! a Maclaurin series in double-double arithmetic for `|z| <= 30` (the
//! alternating series is badly conditioned in plain f64 already at `z ~ 15`)
//! and the standard large-argument Hankel asymptotic expansion beyond. Both
//! paths are exposed so tests can check them against each other across the
//! switchover.

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Argument where evaluation switches from the Maclaurin series to the
/// Hankel asymptotic expansion.
pub const SERIES_ASYMPTOTIC_SWITCH: f64 = 30.0;

/// Order of a normalized Bessel function; must exceed -1 for the series to
/// make sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::Domain(format!(
                "Bessel order must be finite and > -1, got {alpha}"
            )));
        }
        Ok(BesselOrder(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Normalized Bessel function `j_alpha(z)`, with `j_alpha(0) = 1` and
/// `|j_alpha(z)| <= 1` for `alpha >= -1/2` and real `z`.
pub fn normalized_bessel(alpha: f64, z: f64) -> Result<f64> {
    let order = BesselOrder::new(alpha)?;
    if !z.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite, got {z}")));
    }
    Ok(normalized_bessel_unchecked(order, z))
}

/// Same as [`normalized_bessel`] but with a pre-validated order; used in the
/// kernel evaluation hot path.
#[inline]
pub fn normalized_bessel_unchecked(order: BesselOrder, z: f64) -> f64 {
    let za = z.abs();
    if za <= SERIES_ASYMPTOTIC_SWITCH {
        normalized_bessel_series(order.get(), z, 0)
    } else {
        normalized_bessel_asymptotic(order.get(), z)
    }
}

/// Hot-path variant with the gamma prefactor precomputed by the caller and
/// a cheap plain-f64 series below `z = 10` (the alternating series is still
/// well conditioned there).
#[inline]
pub(crate) fn normalized_bessel_cached(alpha: f64, gamma_alpha_plus_1: f64, z: f64) -> f64 {
    let za = z.abs();
    if za <= 10.0 {
        series_f64(alpha, z)
    } else if za <= SERIES_ASYMPTOTIC_SWITCH {
        normalized_bessel_series(alpha, z, 0)
    } else {
        asymptotic_with_gamma(alpha, gamma_alpha_plus_1, z)
    }
}

/// Plain-f64 Maclaurin series; adequate for `|z| <= 10` where the largest
/// term stays below ~1e4.
fn series_f64(alpha: f64, z: f64) -> f64 {
    let u = 0.25 * z * z;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    let mut n = 0usize;
    loop {
        term *= -u / ((n as f64 + 1.0) * (n as f64 + 1.0 + alpha));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        n += 1;
        if term.abs() < 1e-18 * sum.abs().max(1.0) || n > 120 {
            return sum;
        }
    }
}

/// Maclaurin-series evaluation of `j_alpha`, in double-double arithmetic.
///
/// Runs to double-double convergence plus `extra_terms` further terms; the
/// extra terms let tests use a longer summation as an independent oracle.
/// The series is `sum_n (-u)^n / (n! (alpha+1)_n)` with `u = (z/2)^2`;
/// the gamma prefactor cancels into the Pochhammer symbol.
pub fn normalized_bessel_series(alpha: f64, z: f64, extra_terms: usize) -> f64 {
    let u = Dd::from_f64(z * 0.5).mul(Dd::from_f64(z * 0.5));
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut biggest = 1.0f64;
    let mut n = 0usize;
    let mut tail = extra_terms;
    loop {
        // (n+1) is exact; (n+1+alpha) must stay a double-double or its
        // rounding would poison every term at the 1e-16 level
        let shifted = Dd::sum2(n as f64 + 1.0, alpha);
        term = term.mul(u).div_f64(n as f64 + 1.0).div(shifted).neg();
        sum = sum.add(term);
        biggest = biggest.max(term.hi.abs());
        n += 1;
        let converged = term.hi.abs() < 1e-34 * biggest.max(sum.hi.abs()) || n > 400;
        if converged {
            if tail == 0 {
                break;
            }
            tail -= 1;
        }
    }
    sum.to_f64()
}

/// Hankel large-argument expansion of `j_alpha`, valid for `|z|` well above
/// the order. Truncated at the smallest term (capped at 30 terms), which at
/// the switchover point already sits far below f64 roundoff.
pub fn normalized_bessel_asymptotic(alpha: f64, z: f64) -> f64 {
    asymptotic_with_gamma(alpha, gamma_positive(alpha + 1.0), z)
}

pub(crate) fn asymptotic_with_gamma(alpha: f64, gamma_alpha_plus_1: f64, z: f64) -> f64 {
    let za = z.abs();
    let mu = 4.0 * alpha * alpha;
    let omega = za - alpha * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4;
    // P = t0 - t2 + t4 - ..., Q = t1 - t3 + t5 - ...
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut sign_p = 1.0;
    let mut sign_q = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..30 {
        if k % 2 == 0 {
            p += sign_p * term;
            sign_p = -sign_p;
        } else {
            q += sign_q * term;
            sign_q = -sign_q;
        }
        let kf = k as f64;
        let next = term * (mu - (2.0 * kf + 1.0) * (2.0 * kf + 1.0)) / (8.0 * za * (kf + 1.0));
        if next.abs() >= prev || next.abs() < 1e-17 {
            break;
        }
        prev = next.abs();
        term = next;
    }
    let bessel_j = (2.0 / (std::f64::consts::PI * za)).sqrt() * (omega.cos() * p - omega.sin() * q);
    gamma_alpha_plus_1 * (2.0 / za).powf(alpha) * bessel_j
}

/// Amplitude of the large-`z` oscillation of `j_alpha`; the natural scale
/// against which two evaluations of `j_alpha` should be compared.
pub fn bessel_amplitude(alpha: f64, z: f64) -> f64 {
    let za = z.abs().max(f64::MIN_POSITIVE);
    gamma_positive(alpha + 1.0) * (2.0 / za).powf(alpha) * (2.0 / (std::f64::consts::PI * za)).sqrt()
}

// Lanczos approximation, g = 7, 9 coefficients (the familiar GSL-derived set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "log_gamma requires x > 0, got {x}"
        )));
    }
    Ok(log_gamma_positive(x))
}

fn log_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // ln Gamma(x) = ln Gamma(x+1) - ln x
        return log_gamma_positive(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma function for `x > 0`; goes through the Lanczos product directly to
/// avoid the exp(log) detour where it matters.
pub fn gamma_positive(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return gamma_positive(x + 1.0) / x;
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}
