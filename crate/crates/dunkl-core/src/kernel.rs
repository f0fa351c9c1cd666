//! The Dunkl kernel `E_k(ix, y)` in closed form for coordinate-product
//! systems, plus its Maclaurin truncations and the Taylor remainder bound.
//!
//! In rank one the kernel on the imaginary axis is
//! `e_k(t) = j_{k-1/2}(t) + i t/(2k+1) j_{k+1/2}(t)` at `t = x y`, and for a
//! `Z2^d` product it is the product of the per-axis factors. The root
//! normalization `|alpha|^2 = 2` cancels in the Dunkl operator, so it does
//! not affect `E_k`. With all multiplicities zero the kernel degenerates to
//! the plain exponential for any root system.
//!
//! Sign convention: [`KernelContext::eval`] returns `E_k(ix, y)` for real
//! `x`, `y`; the transform side applies the `-i` by conjugation.

use crate::error::{Error, Result};
use crate::root_system::WeightContext;
use crate::specfun::{gamma_positive, normalized_bessel_cached, BesselOrder};
use num_complex::Complex64;

/// Value of the kernel; modulus never exceeds `1 + 1e-12`.
pub type KernelValue = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Per-axis closed form for `Z2^d` products.
    ClosedFormZ2d,
    /// Plain exponential `e^{i<x,y>}`, valid whenever all multiplicities
    /// vanish.
    ClassicalK0,
}

/// Evaluation context: the weight plus precomputed per-axis Bessel orders.
#[derive(Debug, Clone)]
pub struct KernelContext {
    weight: WeightContext,
    mode: KernelMode,
    /// Per axis: multiplicity `k_j` and the orders `k_j - 1/2`, `k_j + 1/2`.
    axes: Vec<AxisKernel>,
}

#[derive(Debug, Clone, Copy)]
struct AxisKernel {
    k: f64,
    lower: f64,
    upper: f64,
    gamma_lower: f64,
    gamma_upper: f64,
    /// Set for k in {1, 2, 3}: half-integer orders admit trigonometric
    /// closed forms away from the origin.
    k_int: Option<u32>,
}

impl AxisKernel {
    fn new(k: f64) -> Result<Self> {
        let lower = BesselOrder::new(k - 0.5)?.get();
        let upper = BesselOrder::new(k + 0.5)?.get();
        let k_int = if k > 0.0 && k <= 3.0 && k.fract() == 0.0 {
            Some(k as u32)
        } else {
            None
        };
        Ok(AxisKernel {
            k,
            lower,
            upper,
            gamma_lower: gamma_positive(lower + 1.0),
            gamma_upper: gamma_positive(upper + 1.0),
            k_int,
        })
    }

    /// Rank-one kernel factor `e_k(t)`.
    #[inline]
    fn eval(&self, t: f64) -> Complex64 {
        if self.k == 0.0 {
            // e_0(t) = cos t + i sin t exactly
            return Complex64::new(t.cos(), t.sin());
        }
        if let Some(n) = self.k_int {
            if t.abs() >= 4.0 {
                // j_(n-1/2) = (2n-1)!! sph_(n-1)(t)/t^(n-1) and
                // t/(2n+1) j_(n+1/2) = (2n-1)!! sph_n(t)/t^(n-1)
                let df = DOUBLE_FACTORIAL_ODD[n as usize - 1];
                let tp = t.powi(n as i32 - 1);
                let re = df * spherical_bessel(n - 1, t) / tp;
                let im = df * spherical_bessel(n, t) / tp;
                return Complex64::new(re, im);
            }
        }
        let re = normalized_bessel_cached(self.lower, self.gamma_lower, t);
        let im = t / (2.0 * self.k + 1.0) * normalized_bessel_cached(self.upper, self.gamma_upper, t);
        Complex64::new(re, im)
    }

    /// Maclaurin coefficient of `e_k` at degree `m`.
    fn coefficient(&self, m: usize) -> Complex64 {
        maclaurin_coefficient(self.k, m)
    }
}

/// (2n-1)!! for n = 1, 2, 3.
const DOUBLE_FACTORIAL_ODD: [f64; 3] = [1.0, 3.0, 15.0];

/// Spherical Bessel `j_n` for n <= 3; only called with `|t| >= 4` where the
/// trigonometric forms do not cancel.
#[inline]
fn spherical_bessel(n: u32, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    match n {
        0 => s / t,
        1 => s / (t * t) - c / t,
        2 => (3.0 / (t * t * t) - 1.0 / t) * s - 3.0 / (t * t) * c,
        _ => {
            let t2 = t * t;
            (15.0 / (t2 * t2) - 6.0 / t2) * s - (15.0 / (t2 * t) - 1.0 / t) * c
        }
    }
}

/// Maclaurin coefficient of the rank-one factor `e_k` at degree `m`:
/// real `(-1)^n / (4^n n! (k+1/2)_n)` for `m = 2n`, imaginary
/// `(-1)^n / ((2k+1) 4^n n! (k+3/2)_n)` for `m = 2n+1`. For `k = 0` this is
/// `i^m / m!`.
pub fn maclaurin_coefficient(k: f64, m: usize) -> Complex64 {
    let n = m / 2;
    let mut mag = 1.0f64;
    if m % 2 == 0 {
        for j in 0..n {
            mag /= 4.0 * (j as f64 + 1.0) * (k + 0.5 + j as f64);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * mag, 0.0)
    } else {
        mag /= 2.0 * k + 1.0;
        for j in 0..n {
            mag /= 4.0 * (j as f64 + 1.0) * (k + 1.5 + j as f64);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, sign * mag)
    }
}

impl KernelContext {
    /// Pick the evaluation mode the weight supports: the `Z2^d` closed form
    /// for coordinate products, the exponential for vanishing multiplicity,
    /// otherwise a capability error.
    pub fn new(weight: WeightContext) -> Result<Self> {
        if let Some(ks) = weight.axis_multiplicities() {
            let axes = ks.iter().map(|&k| AxisKernel::new(k)).collect::<Result<_>>()?;
            return Ok(KernelContext {
                weight,
                mode: KernelMode::ClosedFormZ2d,
                axes,
            });
        }
        if weight.gamma() == 0.0 {
            let axes = (0..weight.dimension())
                .map(|_| AxisKernel::new(0.0))
                .collect::<Result<_>>()?;
            return Ok(KernelContext {
                weight,
                mode: KernelMode::ClassicalK0,
                axes,
            });
        }
        Err(Error::Capability(
            "kernel evaluation needs a coordinate-product system or k = 0".into(),
        ))
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn weight(&self) -> &WeightContext {
        &self.weight
    }

    pub fn dimension(&self) -> usize {
        self.weight.dimension()
    }

    /// `E_k(ix, y)` for real vectors `x`, `y`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> KernelValue {
        debug_assert_eq!(x.len(), self.axes.len());
        debug_assert_eq!(y.len(), self.axes.len());
        match self.mode {
            KernelMode::ClassicalK0 => {
                let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                Complex64::new(t.cos(), t.sin())
            }
            KernelMode::ClosedFormZ2d => {
                let mut acc = Complex64::new(1.0, 0.0);
                for (axis, (&xj, &yj)) in self.axes.iter().zip(x.iter().zip(y)) {
                    acc *= axis.eval(xj * yj);
                }
                acc
            }
        }
    }

    /// Rank-one factor for axis `j`; the building block of `eval`.
    pub fn axis_eval(&self, j: usize, t: f64) -> KernelValue {
        self.axes[j].eval(t)
    }

    /// Degree-`<= n` Taylor truncation of `E_k(ix, y)`: total degree over the
    /// per-axis Maclaurin expansions, which in this setting coincides with
    /// the homogeneous expansion used in the remainder estimate.
    pub fn taylor(&self, x: &[f64], y: &[f64], n: usize) -> KernelValue {
        let d = self.axes.len();
        let t: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
        // coefficient tables per axis up to degree n
        let coef: Vec<Vec<Complex64>> = self
            .axes
            .iter()
            .map(|axis| (0..=n).map(|m| axis.coefficient(m)).collect())
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        // enumerate multi-indices of total degree <= n
        let mut stack: Vec<(usize, usize, Complex64)> = vec![(0, 0, Complex64::new(1.0, 0.0))];
        while let Some((axis, used, partial)) = stack.pop() {
            if axis == d {
                total += partial;
                continue;
            }
            let mut power = Complex64::new(1.0, 0.0);
            for m in 0..=(n - used) {
                if m > 0 {
                    power *= Complex64::new(t[axis], 0.0);
                }
                stack.push((axis + 1, used + m, partial * coef[axis][m] * power));
            }
        }
        total
    }

    /// Check the Taylor remainder bound
    /// `|E - T_n| <= (|x| |y|)^(n+1) / (n+1)!`.
    pub fn remainder_check(&self, x: &[f64], y: &[f64], n: usize) -> RemainderCheck {
        let lhs = (self.eval(x, y) - self.taylor(x, y, n)).norm();
        let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let yn = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut rhs = (xn * yn).powi(n as i32 + 1);
        for m in 1..=(n + 1) {
            rhs /= m as f64;
        }
        RemainderCheck {
            lhs,
            rhs,
            ok: lhs <= rhs * (1.0 + 1e-10) + 1e-300,
        }
    }
}

/// Outcome of a remainder-bound check.
#[derive(Debug, Clone, Copy)]
pub struct RemainderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_system::{MultiplicityFunction, Preset, RootSystemData, WeightContext};

    fn kernel_1d(k: f64) -> KernelContext {
        let sys = RootSystemData::build(Preset::Z2Product, 1).unwrap();
        let w = WeightContext::new(sys, MultiplicityFunction::new(vec![k]).unwrap()).unwrap();
        KernelContext::new(w).unwrap()
    }

    #[test]
    fn kernel_at_zero_is_one() {
        let ctx = kernel_1d(0.7);
        let v = ctx.eval(&[0.0], &[5.0]);
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn classical_reduction() {
        let ctx = kernel_1d(0.0);
        let v = ctx.eval(&[1.0], &[std::f64::consts::PI]);
        assert!((v.re + 1.0).abs() < 1e-14);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn modulus_bounded() {
        let ctx = kernel_1d(0.7);
        for i in 0..500 {
            let t = -20.0 + 40.0 * (i as f64) / 499.0;
            let v = ctx.eval(&[1.0], &[t]);
            assert!(v.norm() <= 1.0 + 1e-12, "|e_k({t})| = {}", v.norm());
        }
    }

    #[test]
    fn symmetry_in_arguments() {
        let sys = RootSystemData::build(Preset::Z2Product, 2).unwrap();
        let w =
            WeightContext::new(sys, MultiplicityFunction::new(vec![0.5, 1.5]).unwrap()).unwrap();
        let ctx = KernelContext::new(w).unwrap();
        let x = [0.3, -1.2];
        let y = [2.0, 0.7];
        let a = ctx.eval(&x, &y);
        let b = ctx.eval(&y, &x);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn taylor_degenerate_cases() {
        let ctx = kernel_1d(0.7);
        // N = 0 truncation is identically 1
        assert_eq!(ctx.taylor(&[0.4], &[1.3], 0), Complex64::new(1.0, 0.0));
        // k = 0, N = 1: 1 + i x y
        let classical = kernel_1d(0.0);
        let t = classical.taylor(&[1.0], &[0.37], 1);
        assert!((t - Complex64::new(1.0, 0.37)).norm() < 1e-15);
    }

    #[test]
    fn taylor_matches_kernel_for_small_arguments() {
        // at xy = 0.3 a degree-12 truncation is far below 1e-12 from e_k
        let ctx = kernel_1d(0.7);
        let v = ctx.eval(&[1.0], &[0.3]);
        let t = ctx.taylor(&[1.0], &[0.3], 12);
        assert!((v - t).norm() < 1e-13);
    }

    #[test]
    fn maclaurin_classical_coefficients() {
        // k = 0 coefficients are i^m / m!
        let mut fact = 1.0;
        for m in 0..8 {
            if m > 0 {
                fact *= m as f64;
            }
            let c = maclaurin_coefficient(0.0, m);
            let expected = Complex64::i().powu(m as u32) / fact;
            assert!((c - expected).norm() < 1e-15, "m = {m}: {c} vs {expected}");
        }
    }

    #[test]
    fn remainder_simple_cases() {
        let classical = kernel_1d(0.0);
        // |e^{0.25 i} - 1| <= 0.25
        let check = classical.remainder_check(&[0.5], &[0.5], 0);
        assert!(check.ok && check.rhs == 0.25);
        // x = 0 gives lhs = 0
        let check0 = classical.remainder_check(&[0.0], &[0.5], 2);
        assert!(check0.ok && check0.lhs == 0.0);
    }

    #[test]
    fn remainder_grid_small() {
        for k in [0.0, 0.5, 2.0] {
            let ctx = kernel_1d(k);
            for n in 0..=4 {
                for i in 0..50 {
                    let t = -5.0 + 10.0 * (i as f64) / 49.0;
                    let check = ctx.remainder_check(&[1.0], &[t], n);
                    assert!(
                        check.ok,
                        "k={k}, n={n}, t={t}: lhs={} rhs={}",
                        check.lhs, check.rhs
                    );
                }
            }
        }
    }

    #[test]
    fn dihedral_with_weight_unsupported() {
        let sys = RootSystemData::build(Preset::Dihedral { order: 4 }, 2).unwrap();
        let w = WeightContext::new(sys.clone(), MultiplicityFunction::constant(1.0, 2).unwrap())
            .unwrap();
        assert!(KernelContext::new(w).is_err());
        // but k = 0 works through the exponential
        let w0 = WeightContext::new(sys, MultiplicityFunction::constant(0.0, 2).unwrap()).unwrap();
        let ctx = KernelContext::new(w0).unwrap();
        assert_eq!(ctx.mode(), KernelMode::ClassicalK0);
        let v = ctx.eval(&[1.0, 1.0], &[0.5, 0.25]);
        assert!((v - Complex64::new(0.75f64.cos(), 0.75f64.sin())).norm() < 1e-14);
    }
}
