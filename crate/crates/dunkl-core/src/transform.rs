//! The Dunkl transform of compactly supported functions by weighted
//! quadrature: `F(f)(x) = c_k * integral of E_k(-ix, y) f(y) d mu_k(y)`.
//!
//! A [`TransformPlan`] fixes the source box `[-r, r]^d` and the quadrature
//! order; preparing a function tabulates it once on the tensor grid so that
//! repeated frequency evaluations cost one per-axis kernel sweep plus an
//! inner product. Evaluations along the first coordinate axis collapse the
//! remaining axes (the kernel factor is 1 at zero frequency) and are
//! correspondingly cheap; the radial sweeps in the Hardy harness live on
//! that path.
//!
//! The plan refuses frequencies beyond its accuracy envelope: the rule
//! order per coordinate must be at least `max(20, ceil(1.5 r |x_j|) + 10)`
//! to resolve the kernel oscillation.

use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::measure::{self, Domain, MeasureContext};
use num_complex::Complex64;

/// Quadrature plan over the source box `[-r, r]^d`.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    measure: MeasureContext,
    kernel: KernelContext,
    support_radius: f64,
    order: usize,
    /// Per-axis nodes with weights that include the axis singular factor.
    axes: Vec<Vec<(f64, f64)>>,
}

impl TransformPlan {
    /// Plan with an explicit per-axis order (>= 20).
    pub fn new(measure: MeasureContext, support_radius: f64, order: usize) -> Result<Self> {
        if !(support_radius > 0.0) || !support_radius.is_finite() {
            return Err(Error::Domain(format!(
                "support radius must be positive, got {support_radius}"
            )));
        }
        let order = order.max(20);
        let kernel = KernelContext::new(measure.weight().clone())?;
        let axis_k = measure.weight().axis_multiplicities().map(<[f64]>::to_vec);
        let d = measure.weight().dimension();
        let mut axes = Vec::with_capacity(d);
        for j in 0..d {
            let axis = match &axis_k {
                Some(ks) => measure::axis_rule_singular(ks[j], -support_radius, support_radius, order)?,
                None => {
                    return Err(Error::Capability(
                        "transform plans need a coordinate-product system or k = 0".into(),
                    ))
                }
            };
            // fold the per-axis singular factor back in: these are the
            // weights against which plain samples of f are summed
            let k = axis_k.as_ref().map_or(0.0, |ks| ks[j]);
            axes.push(
                axis.points
                    .into_iter()
                    .map(|(t, v)| (t, v * 2f64.powf(k) * t.abs().powf(2.0 * k)))
                    .collect(),
            );
        }
        Ok(TransformPlan {
            measure,
            kernel,
            support_radius,
            order,
            axes,
        })
    }

    /// Plan sized so that frequencies up to `max_frequency` per coordinate
    /// stay inside the accuracy envelope.
    pub fn for_max_frequency(
        measure: MeasureContext,
        support_radius: f64,
        max_frequency: f64,
    ) -> Result<Self> {
        let order = (1.5 * support_radius * max_frequency).ceil() as usize + 10;
        Self::new(measure, support_radius, order.max(20))
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn measure(&self) -> &MeasureContext {
        &self.measure
    }

    pub fn kernel(&self) -> &KernelContext {
        &self.kernel
    }

    /// Largest per-coordinate frequency the plan resolves.
    pub fn max_frequency(&self) -> f64 {
        (self.order as f64 - 10.0) / (1.5 * self.support_radius)
    }

    fn check_envelope(&self, x: &[f64]) -> Result<()> {
        let limit = self.max_frequency();
        for (j, &xj) in x.iter().enumerate() {
            if xj.abs() > limit {
                return Err(Error::Accuracy(format!(
                    "frequency component x[{j}] = {xj} exceeds the plan envelope {limit:.3}; \
                     build a higher-order plan (for_max_frequency)"
                )));
            }
        }
        Ok(())
    }

    /// One-shot forward transform of `f` (real, supported in the source
    /// ball) at frequency `x`.
    pub fn forward<F: Fn(&[f64]) -> f64>(&self, f: F, x: &[f64]) -> Result<Complex64> {
        self.prepare(f)?.eval(x)
    }

    /// Tabulate `f` on the plan grid for repeated evaluations.
    pub fn prepare<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<PreparedTransform> {
        let d = self.axes.len();
        let dims: Vec<usize> = self.axes.iter().map(Vec::len).collect();
        let total: usize = dims.iter().product();
        let ck = self.measure.mehta_constant();
        let mut coeff = vec![0.0f64; total];
        let mut node = vec![0.0f64; d];
        for (idx, c) in coeff.iter_mut().enumerate() {
            let mut rest = idx;
            let mut w = ck;
            for j in (0..d).rev() {
                let m = rest % dims[j];
                rest /= dims[j];
                let (t, v) = self.axes[j][m];
                node[j] = t;
                w *= v;
            }
            let fv = f(&node);
            if !fv.is_finite() {
                return Err(Error::Evaluation { node: node.clone() });
            }
            *c = w * fv;
        }
        // collapse all axes but the first: evaluations at (x1, 0, ..) only
        // see the first-axis kernel factors
        let axis_collapsed = if d == 1 {
            coeff.clone()
        } else {
            let stride: usize = dims[1..].iter().product();
            (0..dims[0])
                .map(|a| coeff[a * stride..(a + 1) * stride].iter().sum())
                .collect()
        };
        Ok(PreparedTransform {
            plan: self.clone(),
            dims,
            coeff,
            axis_collapsed,
        })
    }

    /// Relative Plancherel defect of `f` under this plan:
    /// `| ||F f||^2 - ||f||^2 | / ||f||^2` with the frequency-side norm
    /// computed over dyadic annuli with certified tail truncation.
    pub fn plancherel_defect<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64> {
        let prepared = self.prepare(&f)?;
        let source_sq = prepared.source_norm_sq();
        if source_sq == 0.0 {
            return Ok(0.0);
        }
        let freq_sq = prepared.frequency_norm_sq()?;
        Ok((freq_sq - source_sq).abs() / source_sq)
    }
}

/// A function tabulated against a [`TransformPlan`].
pub struct PreparedTransform {
    plan: TransformPlan,
    dims: Vec<usize>,
    /// `c_k * weight * f` per tensor node, row-major in axis order.
    coeff: Vec<f64>,
    /// Coefficients summed over all axes except the first.
    axis_collapsed: Vec<f64>,
}

impl PreparedTransform {
    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    /// Forward transform at frequency `x`.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        self.plan.check_envelope(x)?;
        let d = self.dims.len();
        // per-axis kernel factor tables: conj(e_k(x_j t)) realizes E(-ix, .)
        let tables: Vec<Vec<Complex64>> = (0..d)
            .map(|j| {
                self.plan.axes[j]
                    .iter()
                    .map(|&(t, _)| self.plan.kernel.axis_eval(j, x[j] * t).conj())
                    .collect()
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        match d {
            1 => {
                for (c, e) in self.coeff.iter().zip(&tables[0]) {
                    acc += e * c;
                }
            }
            2 => {
                let stride = self.dims[1];
                for (a, ea) in tables[0].iter().enumerate() {
                    let mut inner = Complex64::new(0.0, 0.0);
                    let row = &self.coeff[a * stride..(a + 1) * stride];
                    for (c, eb) in row.iter().zip(&tables[1]) {
                        inner += eb * c;
                    }
                    acc += ea * inner;
                }
            }
            _ => {
                for (idx, c) in self.coeff.iter().enumerate() {
                    let mut rest = idx;
                    let mut e = Complex64::new(1.0, 0.0);
                    for j in (0..d).rev() {
                        let m = rest % self.dims[j];
                        rest /= self.dims[j];
                        e *= tables[j][m];
                    }
                    acc += e * c;
                }
            }
        }
        Ok(acc)
    }

    /// Forward transform at `x = rho * e_1`; collapses the other axes.
    pub fn eval_on_axis(&self, rho: f64) -> Result<Complex64> {
        self.plan.check_envelope(&[rho])?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(t, _), c) in self.plan.axes[0].iter().zip(&self.axis_collapsed) {
            acc += self.plan.kernel.axis_eval(0, rho * t).conj() * *c;
        }
        Ok(acc)
    }

    /// `||f||^2` in `L^2(mu_k)` on the source side.
    pub fn source_norm_sq(&self) -> f64 {
        // coeff = c_k * w * f, and w carries the measure: sum coeff * f
        // equals c_k ||f||^2, so divide the constant back out
        let d = self.dims.len();
        let mut node = vec![0.0f64; d];
        let mut total = 0.0;
        for (idx, c) in self.coeff.iter().enumerate() {
            let mut rest = idx;
            let mut w = 1.0;
            for j in (0..d).rev() {
                let m = rest % self.dims[j];
                rest /= self.dims[j];
                let (t, v) = self.plan.axes[j][m];
                node[j] = t;
                w *= v;
            }
            if w != 0.0 {
                // f at the node = coeff / (c_k w)
                let fv = c / (self.plan.measure.mehta_constant() * w);
                total += w * fv * fv;
            }
        }
        total
    }

    /// `integral of |y|^m |f(y)| d mu_k`, an upper-bound ingredient for the
    /// Taylor-remainder constant. Accurate enough for certificates.
    pub fn abs_moment(&self, m: f64) -> f64 {
        let d = self.dims.len();
        let mut node = vec![0.0f64; d];
        let mut total = 0.0;
        for (idx, c) in self.coeff.iter().enumerate() {
            let mut rest = idx;
            for j in (0..d).rev() {
                let mi = rest % self.dims[j];
                rest /= self.dims[j];
                node[j] = self.plan.axes[j][mi].0;
            }
            let r = node.iter().map(|t| t * t).sum::<f64>().sqrt();
            total += (c / self.plan.measure.mehta_constant()).abs() * r.powf(m);
        }
        total
    }

    /// `||F f||^2` over dyadic annuli, tails certified below `1e-10` of the
    /// running total.
    fn frequency_norm_sq(&self) -> Result<f64> {
        let d = self.dims.len();
        let order = 24;
        let envelope = self.plan.max_frequency() * if d == 1 { 1.0 } else { (d as f64).sqrt().recip() };
        let modulus_sq = |x: &[f64]| -> Result<f64> { Ok(self.eval(x)?.norm_sqr()) };

        // center piece |x| <= 2^-6
        let mut total = 0.0;
        let inner = self.plan.measure.rule(
            Domain::Ball {
                radius: 2f64.powi(-6),
            },
            order,
        )?;
        total += self
            .plan
            .measure
            .integrate(&inner, |x| modulus_sq(x).unwrap_or(f64::NAN))?;

        let mut lo = 2f64.powi(-6);
        let mut last_two = [f64::INFINITY, f64::INFINITY];
        while lo < envelope {
            let hi = (2.0 * lo).min(envelope);
            let rule = self.plan.measure.rule(Domain::Annulus { lo, hi }, order)?;
            let piece = self
                .plan
                .measure
                .integrate(&rule, |x| modulus_sq(x).unwrap_or(f64::NAN))?;
            total += piece;
            last_two = [last_two[1], piece.abs()];
            if last_two.iter().all(|&p| p < 1e-10 * total.abs().max(1e-300)) {
                return Ok(total);
            }
            lo = hi;
        }
        // ran out of envelope: acceptable only if the tail is already tiny
        if last_two[1] < 1e-8 * total.abs().max(1e-300) {
            Ok(total)
        } else {
            Err(Error::Accuracy(
                "frequency tail still significant at the plan envelope; \
                 build a higher-order plan"
                    .into(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureContext;
    use crate::root_system::{MultiplicityFunction, Preset, RootSystemData, WeightContext};

    fn measure_1d(k: f64) -> MeasureContext {
        let sys = RootSystemData::build(Preset::Z2Product, 1).unwrap();
        let w = WeightContext::new(sys, MultiplicityFunction::new(vec![k]).unwrap()).unwrap();
        MeasureContext::new(w).unwrap()
    }

    #[test]
    fn zero_function_transforms_to_zero() {
        let plan = TransformPlan::new(measure_1d(0.0), 1.0, 24).unwrap();
        let v = plan.forward(|_| 0.0, &[0.5]).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn indicator_matches_classical_sinc() {
        // d=1, k=0, f = chi_[-1,1]: F(x) = c_0 * 2 sin(x)/x
        let plan = TransformPlan::new(measure_1d(0.0), 1.0, 40).unwrap();
        let c0 = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        for &x in &[0.3, 1.0, 2.5, 7.0] {
            let v = plan.forward(|_| 1.0, &[x]).unwrap();
            let expected = c0 * 2.0 * x.sin() / x;
            assert!(
                (v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12,
                "x = {x}: got {v}, expected {expected}"
            );
        }
    }

    #[test]
    fn gaussian_fixed_point() {
        for &k in &[0.0, 0.8] {
            let plan = TransformPlan::for_max_frequency(measure_1d(k), 12.0, 4.0).unwrap();
            let prepared = plan.prepare(|y| (-0.5 * y[0] * y[0]).exp()).unwrap();
            for i in 0..9 {
                let x = 0.5 * i as f64;
                let v = prepared.eval(&[x]).unwrap();
                let expected = (-0.5 * x * x).exp();
                assert!(
                    (v.re - expected).abs() <= 1e-6 * expected && v.im.abs() < 1e-9,
                    "k = {k}, x = {x}: {v} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn envelope_is_enforced() {
        let plan = TransformPlan::new(measure_1d(0.0), 1.0, 24).unwrap();
        let err = plan.forward(|_| 1.0, &[100.0]).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)));
    }

    #[test]
    fn axis_eval_agrees_with_full_eval() {
        let sys = RootSystemData::build(Preset::Z2Product, 2).unwrap();
        let w =
            WeightContext::new(sys, MultiplicityFunction::new(vec![0.5, 0.5]).unwrap()).unwrap();
        let measure = MeasureContext::new(w).unwrap();
        let plan = TransformPlan::new(measure, 1.0, 24).unwrap();
        let prepared = plan
            .prepare(|y| {
                let r2 = y[0] * y[0] + y[1] * y[1];
                if r2 < 1.0 {
                    (-1.0 / (1.0 - r2)).exp()
                } else {
                    0.0
                }
            })
            .unwrap();
        for &rho in &[0.1, 1.0, 3.0] {
            let full = prepared.eval(&[rho, 0.0]).unwrap();
            let axis = prepared.eval_on_axis(rho).unwrap();
            assert!((full - axis).norm() < 1e-13);
        }
    }

    #[test]
    fn uniform_bound_by_l1_norm() {
        // |F f(x)| <= c_k ||f||_L1(mu)
        let plan = TransformPlan::for_max_frequency(measure_1d(1.0), 1.0, 40.0).unwrap();
        let bump = |y: &[f64]| {
            let t = y[0];
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        };
        let prepared = plan.prepare(bump).unwrap();
        let bound = plan.measure().mehta_constant() * prepared.abs_moment(0.0);
        for i in 0..40 {
            let x = i as f64;
            let v = prepared.eval(&[x]).unwrap().norm();
            assert!(v <= bound * (1.0 + 1e-10), "x = {x}: {v} > {bound}");
        }
    }

    #[test]
    fn plancherel_defect_smooth_bump() {
        let plan = TransformPlan::for_max_frequency(measure_1d(0.0), 1.0, 400.0).unwrap();
        let bump = |y: &[f64]| {
            let t = y[0];
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        };
        let defect = plan.plancherel_defect(bump).unwrap();
        assert!(defect <= 1e-4, "defect = {defect}");
    }

    #[test]
    fn plancherel_zero_function() {
        let plan = TransformPlan::new(measure_1d(0.5), 1.0, 24).unwrap();
        assert_eq!(plan.plancherel_defect(|_| 0.0).unwrap(), 0.0);
    }
}
