//! Integration against `d mu_k = w_k(y) dy`: singular-weight quadrature
//! rules over boxes, balls, and annuli, the Mehta-type normalization
//! constant, closed-form ball volumes, and radial power integrals.
//!
//! For coordinate-product systems each axis carries a Gauss–Jacobi rule
//! split at 0 so the non-smooth `|t|^(2k)` factor is integrated exactly;
//! otherwise plain Gauss–Legendre with the weight evaluated explicitly.
//! Balls and annuli in d = 2 are handled in polar form: a radial rule with
//! the `rho^(2 gamma + 1)` factor built in, times an angular rule split at
//! the singular directions of `w_k`.

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::root_system::WeightContext;
use crate::specfun::gamma_positive;

/// Integration domain of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Cartesian product of intervals.
    Box { bounds: Vec<(f64, f64)> },
    /// Ball of given radius centered at the origin.
    Ball { radius: f64 },
    /// Annulus `lo <= |y| <= hi` centered at the origin.
    Annulus { lo: f64, hi: f64 },
}

/// Nodes and plain weights: `sum_i weights[i] * w_k(nodes[i]) * f(nodes[i])`
/// approximates the `mu_k`-integral of `f` over the domain.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub domain: Domain,
    pub order: usize,
}

/// Angular rule on the unit sphere of `R^2` (or the two-point sphere of
/// `R^1`): `sum_i weights[i] * g(angle: nodes[i])` approximates the integral
/// of `w_k(u) g(u)` over the sphere.
#[derive(Debug, Clone)]
pub struct AngularRule {
    /// Angles in `[0, 2 pi)` for d = 2; `0` and `pi` for d = 1.
    pub nodes: Vec<f64>,
    /// Weights with the `w_k` factor folded in.
    pub weights: Vec<f64>,
}

/// Measure-level context: weight, Mehta constant, angular mass.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    weight: WeightContext,
    mehta_constant: f64,
    angular_constant: f64,
}

impl MeasureContext {
    pub fn new(weight: WeightContext) -> Result<Self> {
        let angular_constant = if weight.axis_multiplicities().is_some() {
            angular_product_closed_form(&weight, 0.0)
        } else if weight.dimension() == 2 {
            let rule = angular_rule(&weight, 64)?;
            rule.weights.iter().sum()
        } else {
            return Err(Error::Config(
                "non-product systems are only supported in d = 2".into(),
            ));
        };
        // 1/c_k = angular mass * int_0^inf e^(-rho^2/2) rho^(2 gamma + d - 1) d rho
        let half_dim = 0.5 * weight.homogeneous_dimension();
        let radial = 2f64.powf(half_dim - 1.0) * gamma_positive(half_dim);
        let mehta_constant = 1.0 / (angular_constant * radial);
        Ok(MeasureContext {
            weight,
            mehta_constant,
            angular_constant,
        })
    }

    pub fn weight(&self) -> &WeightContext {
        &self.weight
    }

    /// The Mehta-type constant `c_k`, normalizing the Gaussian integral.
    pub fn mehta_constant(&self) -> f64 {
        self.mehta_constant
    }

    /// Total `w_k`-mass of the unit sphere.
    pub fn angular_constant(&self) -> f64 {
        self.angular_constant
    }

    /// `int_{S^{d-1}} |u_1|^e w_k(u) d omega` for product systems (any d).
    pub fn angular_weighted_monomial(&self, exponent: f64) -> Result<f64> {
        if self.weight.axis_multiplicities().is_none() {
            return Err(Error::Capability(
                "weighted angular monomials need a coordinate-product system".into(),
            ));
        }
        Ok(angular_product_closed_form(&self.weight, exponent))
    }

    /// Signed monomial moment on the sphere:
    /// `int_{S^{d-1}} prod_j u_j^(e_j) w_k(u) d omega`. Vanishes whenever
    /// some exponent is odd; closed form for product systems, arc quadrature
    /// otherwise (d = 2).
    pub fn angular_signed_monomial(&self, exponents: &[usize]) -> Result<f64> {
        let d = self.weight.dimension();
        if exponents.len() != d {
            return Err(Error::Domain(format!(
                "expected {d} exponents, got {}",
                exponents.len()
            )));
        }
        if exponents.iter().any(|e| e % 2 == 1) {
            return Ok(0.0);
        }
        if let Some(ks) = self.weight.axis_multiplicities() {
            if d == 1 {
                return Ok(self.weight.weight_eval(&[1.0]) + self.weight.weight_eval(&[-1.0]));
            }
            let mut log_num = 0.0;
            let mut a_sum = 0.0;
            for (&e, &k) in exponents.iter().zip(ks) {
                let a_j = e as f64 + 2.0 * k;
                log_num += log_gamma_half(a_j + 1.0);
                a_sum += a_j;
            }
            let log_den = log_gamma_half(a_sum + d as f64);
            return Ok(2f64.powf(self.weight.gamma()) * 2.0 * (log_num - log_den).exp());
        }
        let rule = angular_rule(&self.weight, 64)?;
        Ok(rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| {
                w * t.cos().powi(exponents[0] as i32) * t.sin().powi(exponents[1] as i32)
            })
            .sum())
    }

    /// Closed-form `mu_k(B(0, r))`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("ball radius must be > 0, got {r}")));
        }
        let hd = self.weight.homogeneous_dimension();
        let gamma = self.weight.gamma();
        let d = self.weight.dimension() as f64;
        Ok(r.powf(hd)
            / (self.mehta_constant
                * 2f64.powf(gamma + 0.5 * d)
                * gamma_positive(gamma + 0.5 * d + 1.0)))
    }

    /// `int over rho_lo < |y| < rho_hi of |y|^beta d mu_k`, in closed form.
    ///
    /// `rho_hi` may be `f64::INFINITY`. Divergent exponent configurations
    /// return [`Error::Divergence`].
    pub fn power_integral(&self, beta: f64, rho_lo: f64, rho_hi: f64) -> Result<f64> {
        if !(rho_lo >= 0.0) || !(rho_hi > rho_lo) {
            return Err(Error::Domain(format!(
                "need 0 <= rho_lo < rho_hi, got [{rho_lo}, {rho_hi}]"
            )));
        }
        let a = beta + self.weight.homogeneous_dimension();
        let radial = if rho_hi.is_finite() {
            if rho_lo == 0.0 {
                if a <= 0.0 {
                    return Err(Error::Divergence(format!(
                        "radial exponent {a} <= 0 diverges at the origin"
                    )));
                }
                rho_hi.powf(a) / a
            } else if a == 0.0 {
                (rho_hi / rho_lo).ln()
            } else {
                (rho_hi.powf(a) - rho_lo.powf(a)) / a
            }
        } else {
            if a >= 0.0 {
                return Err(Error::Divergence(format!(
                    "radial exponent {a} >= 0 diverges at infinity"
                )));
            }
            if rho_lo == 0.0 {
                return Err(Error::Divergence(
                    "integral over all of R^d with a pure power diverges".into(),
                ));
            }
            -rho_lo.powf(a) / a
        };
        Ok(self.angular_constant * radial)
    }

    /// Build a quadrature rule for the given domain; `order` is the number
    /// of points per 1-D factor.
    pub fn rule(&self, domain: Domain, order: usize) -> Result<QuadratureRule> {
        if order == 0 {
            return Err(Error::Domain("rule order must be >= 1".into()));
        }
        let d = self.weight.dimension();
        match &domain {
            Domain::Box { bounds } => {
                if bounds.len() != d {
                    return Err(Error::Config(format!(
                        "box has {} bounds, dimension is {d}",
                        bounds.len()
                    )));
                }
                let axes = self.axis_rules(bounds, order)?;
                let (nodes, weights) = tensor(&axes);
                Ok(QuadratureRule {
                    nodes,
                    weights,
                    domain,
                    order,
                })
            }
            Domain::Ball { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::Domain("ball radius must be > 0".into()));
                }
                self.radial_domain_rule(domain.clone(), 0.0, *radius, order)
            }
            Domain::Annulus { lo, hi } => {
                if !(*lo >= 0.0) || !(*hi > *lo) || !hi.is_finite() {
                    return Err(Error::Domain(format!(
                        "annulus needs 0 <= lo < hi < inf, got [{lo}, {hi}]"
                    )));
                }
                self.radial_domain_rule(domain.clone(), *lo, *hi, order)
            }
        }
    }

    /// Weighted integral of `f` with the rule: nodes carry plain weights,
    /// `w_k` is applied here.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, rule: &QuadratureRule, f: F) -> Result<f64> {
        let mut parts: Vec<f64> = Vec::with_capacity(rule.nodes.len());
        for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = f(node);
            if !v.is_finite() {
                return Err(Error::Evaluation { node: node.clone() });
            }
            parts.push(w * self.weight.weight_eval(node) * v);
        }
        Ok(pairwise_sum(&parts))
    }

    /// Like [`integrate`](Self::integrate) for complex-valued integrands.
    pub fn integrate_complex<F: Fn(&[f64]) -> (f64, f64)>(
        &self,
        rule: &QuadratureRule,
        f: F,
    ) -> Result<(f64, f64)> {
        let mut re: Vec<f64> = Vec::with_capacity(rule.nodes.len());
        let mut im: Vec<f64> = Vec::with_capacity(rule.nodes.len());
        for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (a, b) = f(node);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Evaluation { node: node.clone() });
            }
            let ww = w * self.weight.weight_eval(node);
            re.push(ww * a);
            im.push(ww * b);
        }
        Ok((pairwise_sum(&re), pairwise_sum(&im)))
    }

    /// Recompute `1/c_k` by quadrature of the Gaussian over a large box
    /// (product systems) or a doubled-order angular rule (d = 2 otherwise).
    pub fn mehta_by_quadrature(&self, order: usize) -> Result<f64> {
        if self.weight.axis_multiplicities().is_some() {
            let d = self.weight.dimension();
            let bounds = vec![(-12.0, 12.0); d];
            let rule = self.rule(Domain::Box { bounds }, order)?;
            let total = self.integrate(&rule, |y| {
                (-0.5 * y.iter().map(|t| t * t).sum::<f64>()).exp()
            })?;
            Ok(1.0 / total)
        } else {
            let rule = angular_rule(&self.weight, 2 * order.max(32))?;
            let angular: f64 = rule.weights.iter().sum();
            let half_dim = 0.5 * self.weight.homogeneous_dimension();
            let radial = 2f64.powf(half_dim - 1.0) * gamma_positive(half_dim);
            Ok(1.0 / (angular * radial))
        }
    }

    /// Angular rule for this context (d <= 2).
    pub fn angular(&self, order: usize) -> Result<AngularRule> {
        angular_rule(&self.weight, order)
    }

    fn axis_rules(&self, bounds: &[(f64, f64)], order: usize) -> Result<Vec<Axis1d>> {
        let axis_k = self.weight.axis_multiplicities();
        bounds
            .iter()
            .enumerate()
            .map(|(j, &(lo, hi))| {
                if !(lo < hi) {
                    return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
                }
                match axis_k {
                    Some(ks) => axis_rule_singular(ks[j], lo, hi, order),
                    None => axis_rule_plain(lo, hi, order),
                }
            })
            .collect()
    }

    fn radial_domain_rule(
        &self,
        domain: Domain,
        lo: f64,
        hi: f64,
        order: usize,
    ) -> Result<QuadratureRule> {
        let d = self.weight.dimension();
        let hd = self.weight.homogeneous_dimension();
        match d {
            1 => {
                // two mirror intervals (one interval when lo = 0)
                let k = self.weight.axis_multiplicities().map(|ks| ks[0]);
                let axis = match k {
                    Some(kv) => axis_rule_singular(kv, -hi, hi, order)?,
                    None => axis_rule_plain(-hi, hi, order)?,
                };
                let mut nodes = Vec::new();
                let mut weights = Vec::new();
                if lo == 0.0 {
                    for (t, v) in axis.points {
                        nodes.push(vec![t]);
                        weights.push(v);
                    }
                } else {
                    for sign in [-1.0, 1.0] {
                        let piece = match k {
                            Some(kv) => axis_rule_singular(kv, lo, hi, order)?,
                            None => axis_rule_plain(lo, hi, order)?,
                        };
                        for (t, v) in piece.points {
                            nodes.push(vec![sign * t]);
                            weights.push(v);
                        }
                    }
                }
                Ok(QuadratureRule {
                    nodes,
                    weights,
                    domain,
                    order,
                })
            }
            2 => {
                let ang = angular_rule(&self.weight, order)?;
                // radial factor rho^(2 gamma + d - 1), singular only at 0
                let radial: Vec<(f64, f64)> = if lo == 0.0 {
                    let gj = gauss_jacobi(order, 0.0, hd - 1.0)?;
                    let half = 0.5 * hi;
                    gj.nodes
                        .iter()
                        .zip(&gj.weights)
                        .map(|(&x, &w)| (half * (x + 1.0), w * half.powf(hd)))
                        .collect()
                } else {
                    let gl = gauss_legendre(order)?;
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (hi + lo);
                    gl.nodes
                        .iter()
                        .zip(&gl.weights)
                        .map(|(&x, &w)| {
                            let rho = half * x + mid;
                            (rho, w * half * rho.powf(hd - 1.0))
                        })
                        .collect()
                };
                let mut nodes = Vec::with_capacity(radial.len() * ang.nodes.len());
                let mut weights = Vec::with_capacity(nodes.capacity());
                for &(rho, rw) in &radial {
                    for (theta, &aw) in ang.nodes.iter().zip(&ang.weights) {
                        let node = vec![rho * theta.cos(), rho * theta.sin()];
                        let wk = self.weight.weight_eval(&node);
                        if wk == 0.0 {
                            // angular nodes avoid the mirrors, so this can
                            // only be roundoff underflow at huge exponents
                            return Err(Error::Construction(
                                "quadrature node fell on a reflecting hyperplane".into(),
                            ));
                        }
                        // rw*aw carries rho^(2g+1) * w_k(u); convert to the
                        // plain-weight convention via w_k(node) = rho^2g w_k(u)
                        nodes.push(node);
                        weights.push(rw * aw / wk);
                    }
                }
                Ok(QuadratureRule {
                    nodes,
                    weights,
                    domain,
                    order,
                })
            }
            _ => Err(Error::Domain(format!(
                "ball/annulus rules are implemented for d <= 2, got d = {d}"
            ))),
        }
    }
}

/// One axis of a tensor rule: (node, plain weight) pairs whose weighted sum
/// against `2^k |t|^(2k) g(t)` reproduces the weighted integral.
pub(crate) struct Axis1d {
    pub(crate) points: Vec<(f64, f64)>,
}

/// Split-at-zero Gauss–Jacobi rule for the axis weight `2^k |t|^(2k)`.
/// The returned weights are plain: the singular factor is divided back out
/// so the caller can multiply by the full `w_k` at the node.
pub(crate) fn axis_rule_singular(k: f64, lo: f64, hi: f64, order: usize) -> Result<Axis1d> {
    let mut points = Vec::new();
    let factor = |t: f64| 2f64.powf(k) * t.abs().powf(2.0 * k);
    let mut push_zero_piece = |a: f64, sign: f64| -> Result<()> {
        // integral over [0, a] of t^(2k) g(sign * t) dt, a > 0
        let gj = gauss_jacobi(order, 0.0, 2.0 * k)?;
        let half = 0.5 * a;
        for (&x, &w) in gj.nodes.iter().zip(&gj.weights) {
            let t = half * (x + 1.0);
            let included = w * half.powf(2.0 * k + 1.0) * 2f64.powf(k);
            points.push((sign * t, included / factor(t)));
        }
        Ok(())
    };
    if lo >= 0.0 {
        if lo == 0.0 {
            push_zero_piece(hi, 1.0)?;
        } else {
            gl_piece(&mut points, lo, hi, order)?;
        }
    } else if hi <= 0.0 {
        if hi == 0.0 {
            push_zero_piece(-lo, -1.0)?;
        } else {
            gl_piece(&mut points, lo, hi, order)?;
        }
    } else {
        push_zero_piece(-lo, -1.0)?;
        push_zero_piece(hi, 1.0)?;
    }
    Ok(Axis1d { points })
}

fn axis_rule_plain(lo: f64, hi: f64, order: usize) -> Result<Axis1d> {
    let mut points = Vec::new();
    gl_piece(&mut points, lo, hi, order)?;
    Ok(Axis1d { points })
}

fn gl_piece(points: &mut Vec<(f64, f64)>, lo: f64, hi: f64, order: usize) -> Result<()> {
    let gl = gauss_legendre(order)?;
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
        points.push((half * x + mid, w * half));
    }
    Ok(())
}

/// Tensor product of axis rules with plain weights.
fn tensor(axes: &[Axis1d]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut nodes: Vec<Vec<f64>> = vec![Vec::new()];
    let mut weights: Vec<f64> = vec![1.0];
    for axis in axes {
        let mut new_nodes = Vec::with_capacity(nodes.len() * axis.points.len());
        let mut new_weights = Vec::with_capacity(new_nodes.capacity());
        for (node, &w) in nodes.iter().zip(&weights) {
            for &(t, v) in &axis.points {
                let mut n = node.clone();
                n.push(t);
                new_nodes.push(n);
                new_weights.push(w * v);
            }
        }
        nodes = new_nodes;
        weights = new_weights;
    }
    (nodes, weights)
}

/// Angular rule for `w_k` on the sphere: exact arc-splitting at the singular
/// directions with Gauss–Jacobi endpoint exponents.
pub fn angular_rule(weight: &WeightContext, order: usize) -> Result<AngularRule> {
    match weight.dimension() {
        1 => {
            // S^0 = {+1, -1}
            Ok(AngularRule {
                nodes: vec![0.0, std::f64::consts::PI],
                weights: vec![weight.weight_eval(&[1.0]), weight.weight_eval(&[-1.0])],
            })
        }
        2 => {
            let tau = 2.0 * std::f64::consts::PI;
            // singular directions: u(theta) perpendicular to a positive root
            let mut cuts: Vec<(f64, f64)> = Vec::new(); // (angle, exponent 2k)
            for &i in &weight.root_system.positive_roots {
                let r = &weight.root_system.roots[i];
                let k = weight.multiplicity.values[weight.root_system.orbit_id[i]];
                let phi = r[1].atan2(r[0]);
                for offset in [0.5 * std::f64::consts::PI, 1.5 * std::f64::consts::PI] {
                    let ang = (phi + offset).rem_euclid(tau);
                    match cuts
                        .iter_mut()
                        .find(|(a, _)| (a - ang).abs() < 1e-9 || (a - ang).abs() > tau - 1e-9)
                    {
                        Some(entry) => entry.1 += 2.0 * k,
                        None => cuts.push((ang, 2.0 * k)),
                    }
                }
            }
            cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            if cuts.is_empty() {
                cuts.push((0.0, 0.0));
            }
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            let m = cuts.len();
            for i in 0..m {
                let (a, ea) = cuts[i];
                let (b_raw, eb) = cuts[(i + 1) % m];
                let b = if i + 1 == m { b_raw + tau } else { b_raw };
                let gj = gauss_jacobi(order, eb, ea)?;
                let half = 0.5 * (b - a);
                let mid = 0.5 * (b + a);
                for (&x, &w) in gj.nodes.iter().zip(&gj.weights) {
                    let theta = half * x + mid;
                    let u = [theta.cos(), theta.sin()];
                    let wk = weight.weight_eval(&u);
                    // ratio of w_k to its endpoint power behavior, smooth on the arc
                    let smooth =
                        wk / ((theta - a).powf(ea) * (b - theta).powf(eb));
                    nodes.push(theta.rem_euclid(tau));
                    weights.push(w * half.powf(1.0 + ea + eb) * smooth);
                }
            }
            Ok(AngularRule { nodes, weights })
        }
        d => Err(Error::Domain(format!(
            "angular rules are implemented for d <= 2, got d = {d}"
        ))),
    }
}

/// Closed-form `int_{S^{d-1}} |u_1|^e * w_k(u) d omega` for product systems:
/// the classical monomial-moment formula on the sphere times the `2^gamma`
/// root-normalization factor.
fn angular_product_closed_form(weight: &WeightContext, exponent: f64) -> f64 {
    let ks = weight
        .axis_multiplicities()
        .expect("caller checked product structure");
    let d = weight.dimension();
    if d == 1 {
        // two-point sphere: |u_1| = 1
        return weight.weight_eval(&[1.0]) + weight.weight_eval(&[-1.0]);
    }
    let mut log_num = 0.0;
    let mut a_sum = 0.0;
    for (j, &k) in ks.iter().enumerate() {
        let a_j = 2.0 * k + if j == 0 { exponent } else { 0.0 };
        log_num += log_gamma_half(a_j + 1.0);
        a_sum += a_j;
    }
    let log_den = log_gamma_half(a_sum + d as f64);
    2f64.powf(weight.gamma()) * 2.0 * (log_num - log_den).exp()
}

fn log_gamma_half(two_x: f64) -> f64 {
    crate::specfun::log_gamma(0.5 * two_x).expect("positive argument")
}

/// Pairwise (cascade) summation: deterministic and accurate for our node
/// counts.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}
