//! Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
//!
//! Used where a plain f64 summation would lose digits to cancellation, most
//! notably the alternating Bessel series at moderate arguments. Roughly 31
//! significant digits; only the handful of operations the crate needs.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    // mul_add is a fused multiply-add: a*b - p computed with one rounding,
    // which makes the residual exact.
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let s2 = s2 + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, other: f64) -> Dd {
        let q1 = self.hi / other;
        // residual r = self - q1*other, computed exactly
        let (p1, p2) = two_prod(q1, other);
        let r = (self.hi - p1) + (self.lo - p2);
        let q2 = r / other;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul_f64_exactish(q1).neg());
        let q2 = r.hi / other.hi;
        let r2 = r.add(other.mul_f64_exactish(q2).neg());
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    #[inline]
    fn mul_f64_exactish(self, other: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, other);
        let p2 = p2 + self.lo * other;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    /// Error-free sum of two f64 values as a Dd.
    #[inline]
    pub fn sum2(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_recovers_cancelled_digits() {
        // (1 + 1e-20) - 1 in f64 is 0; in double-double it is 1e-20.
        let x = Dd::ONE.add(Dd::from_f64(1e-20));
        let y = x.add(Dd::from_f64(-1.0));
        assert_eq!(y.to_f64(), 1e-20);
    }

    #[test]
    fn mul_keeps_residual() {
        // (1 + 2^-50)^2 = 1 + 2^-49 + 2^-100, all within double-double range
        let x = Dd::ONE.add(Dd::from_f64(2f64.powi(-50)));
        let y = x.mul(x);
        let err = y.add(Dd::from_f64(-1.0)).add(Dd::from_f64(-(2f64.powi(-49))));
        assert_eq!(err.to_f64(), 2f64.powi(-100));
    }

    #[test]
    fn div_roundtrip() {
        let x = Dd::from_f64(std::f64::consts::PI);
        let y = x.div_f64(7.0).mul(Dd::from_f64(7.0));
        let diff = y.add(x.neg());
        assert!(diff.to_f64().abs() < 1e-30);
    }
}
