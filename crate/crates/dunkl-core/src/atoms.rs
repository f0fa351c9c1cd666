//! Construction and certification of `(p, infinity, s)`-atoms supported in
//! `B(0, r)`: smooth bump times polynomial profiles whose `mu_k`-moments
//! vanish through order `s`, with the sup-norm bound
//! `||a||_inf <= mu_k(B(0,r))^(-1/p)` enforced with equality.
//!
//! A profile is a parity-pure family of bump-times-monomial basis functions;
//! the construction solves the small weighted-moment system so the required
//! moments vanish while the first non-forced moment is normalized, then
//! rescales to the size condition. Parity purity keeps the transform of the
//! atom a single real phase, which the sweep machinery relies on.
//!
//! Seeds pick profiles: seeds 0 and 1 give "probe-grade" atoms whose first
//! nonvanishing moment is exactly `N + 1` (bump sharpness differs), seed 2
//! gives the opposite parity with first moment `N + 2`. In d = 2 seeds 0/1
//! are `y_1`-odd radial profiles and seed 2 is purely radial.

use crate::error::{Error, Result};
use crate::measure::{Domain, MeasureContext, QuadratureRule};
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use serde::{Deserialize, Serialize};

/// `N = floor((2 gamma + d)(1/p - 1))`, the forced cancellation order.
///
/// Exact-integer products are resolved upward: the grid values used by the
/// harness are rationals and the floor must not lose them to roundoff.
pub fn cancellation_order(p: f64, gamma: f64, d: usize) -> Result<usize> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1], got {p}")));
    }
    let hd = 2.0 * gamma + d as f64;
    let t = hd * (1.0 / p - 1.0);
    Ok((t + 1e-9).floor() as usize)
}

/// Parameters of an atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub p: f64,
    /// Cancellation order actually enforced; `s >= n_moment`.
    pub s: usize,
    pub radius: f64,
    pub seed: u32,
    /// `N` recomputed from `(p, gamma, d)`.
    pub n_moment: usize,
}

impl AtomSpec {
    pub fn new(ctx: &MeasureContext, p: f64, radius: f64, seed: u32) -> Result<Self> {
        let n = cancellation_order(p, ctx.weight().gamma(), ctx.weight().dimension())?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("atom radius must be > 0, got {radius}")));
        }
        Ok(AtomSpec {
            p,
            s: n,
            radius,
            seed,
            n_moment: n,
        })
    }

    /// Override the enforced cancellation order (`s >= N`).
    pub fn with_s(mut self, s: usize) -> Result<Self> {
        if s < self.n_moment {
            return Err(Error::Domain(format!(
                "s = {s} must be >= N = {}",
                self.n_moment
            )));
        }
        self.s = s;
        Ok(self)
    }
}

/// One basis function: `psi_c(|y|/r) * prod_j (y_j/r)^deg_j * (|y|/r)^(2q)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileTerm {
    pub degrees: Vec<usize>,
    pub radial_power: usize,
}

impl ProfileTerm {
    fn total_degree(&self) -> usize {
        self.degrees.iter().sum::<usize>() + 2 * self.radial_power
    }
}

/// A seeded basis family together with its bump sharpness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    pub bump_sharpness: f64,
    pub terms: Vec<ProfileTerm>,
    /// Coordinate parities of every term (they must all agree).
    pub parity: Vec<u8>,
    /// Multi-index whose moment is normalized to 1 before rescaling.
    pub normalized_moment: Vec<usize>,
}

impl Profile {
    /// Profile family for dimension `d`, forced order `s`, and seed.
    fn for_seed(d: usize, s: usize, seed: u32) -> Result<Profile> {
        let variant = seed % 3;
        let bump_sharpness = match variant {
            0 => 1.0,
            1 => 2.0,
            _ => 0.5,
        };
        match d {
            1 => {
                let (parity, max_deg, normalized) = if variant < 2 {
                    // probe grade: parity of s+1, first active moment s+1
                    ((s + 1) % 2, s + 1, s + 1)
                } else {
                    // opposite parity: first active moment s+2
                    (s % 2, s + 2, s + 2)
                };
                let terms = (0..=max_deg)
                    .filter(|m| m % 2 == parity)
                    .map(|m| ProfileTerm {
                        degrees: vec![m],
                        radial_power: 0,
                    })
                    .collect();
                Ok(Profile {
                    bump_sharpness,
                    terms,
                    parity: vec![parity as u8],
                    normalized_moment: vec![normalized],
                })
            }
            2 => {
                if variant < 2 {
                    // y1-odd probe profile; needs even s so that degree s+1
                    // moments can be nonzero for a y1-odd, y2-even function
                    if s % 2 != 0 {
                        return Err(Error::Construction(format!(
                            "no y1-odd probe profile for odd cancellation order s = {s}"
                        )));
                    }
                    let terms = (0..=s / 2)
                        .map(|q| ProfileTerm {
                            degrees: vec![1, 0],
                            radial_power: q,
                        })
                        .collect();
                    Ok(Profile {
                        bump_sharpness,
                        terms,
                        parity: vec![1, 0],
                        normalized_moment: vec![s + 1, 0],
                    })
                } else {
                    // radial profile: first active moment degree is the
                    // smallest even integer above s
                    let first_active = if (s + 1) % 2 == 0 { s + 1 } else { s + 2 };
                    let terms = (0..=s / 2 + 1)
                        .map(|q| ProfileTerm {
                            degrees: vec![0, 0],
                            radial_power: q,
                        })
                        .collect();
                    Ok(Profile {
                        bump_sharpness,
                        terms,
                        parity: vec![0, 0],
                        normalized_moment: vec![first_active, 0],
                    })
                }
            }
            _ => Err(Error::Construction(format!(
                "atom profiles are implemented for d <= 2, got d = {d}"
            ))),
        }
    }

    fn bump(&self, t: f64) -> f64 {
        if t.abs() < 1.0 {
            (-self.bump_sharpness / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    }

    /// Evaluate the basis combination at `y` for support radius `r`.
    fn eval(&self, coefficients: &[f64], r: f64, y: &[f64]) -> f64 {
        let rho2: f64 = y.iter().map(|t| t * t).sum();
        let rho = rho2.sqrt();
        let t = rho / r;
        if t >= 1.0 {
            return 0.0;
        }
        let psi = self.bump(t);
        let mut acc = 0.0;
        for (c, term) in coefficients.iter().zip(&self.terms) {
            let mut v = *c;
            for (yj, &dj) in y.iter().zip(&term.degrees) {
                for _ in 0..dj {
                    v *= yj / r;
                }
            }
            v *= t.powi(2 * term.radial_power as i32);
            acc += v;
        }
        psi * acc
    }

    /// Scalar radial profile along the first axis (where `|a|` peaks for
    /// these parity classes); valid because every term's angular factor is
    /// maximized on the axis.
    fn radial_magnitude(&self, coefficients: &[f64], r: f64, rho: f64) -> f64 {
        let t = rho / r;
        if t >= 1.0 {
            return 0.0;
        }
        let psi = self.bump(t);
        let mut acc = 0.0;
        for (c, term) in coefficients.iter().zip(&self.terms) {
            acc += c * t.powi(term.total_degree() as i32);
        }
        (psi * acc).abs()
    }
}

/// Residual record for one certified moment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentCertificate {
    pub multi_index: Vec<usize>,
    pub residual: f64,
    pub threshold: f64,
    pub ok: bool,
}

/// Certification outcome of [`verify`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomCertificate {
    pub support_ok: bool,
    pub sup_norm: f64,
    pub size_bound: f64,
    pub size_ok: bool,
    pub moments: Vec<MomentCertificate>,
    pub passed: bool,
}

/// A certified atom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Atom {
    pub spec: AtomSpec,
    pub profile: Profile,
    pub coefficients: Vec<f64>,
    pub sup_norm: f64,
    pub moment_certificates: Vec<MomentCertificate>,
    /// Total degree of the first nonvanishing moment.
    pub first_active_degree: usize,
    /// Value of that moment after the final rescaling.
    pub active_moment_value: f64,
}

impl Atom {
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.profile.eval(&self.coefficients, self.spec.radius, y)
    }

    /// Coordinate parities of the atom.
    pub fn parity(&self) -> &[u8] {
        &self.profile.parity
    }

    /// `|a|` restricted to the first axis; the sup over the support equals
    /// the sup over this ray for the implemented parity classes.
    pub fn radial_magnitude(&self, rho: f64) -> f64 {
        self.profile
            .radial_magnitude(&self.coefficients, self.spec.radius, rho)
    }
}

fn moment_rule(ctx: &MeasureContext, r: f64, order: usize) -> Result<QuadratureRule> {
    let d = ctx.weight().dimension();
    ctx.rule(
        Domain::Box {
            bounds: vec![(-r, r); d],
        },
        order,
    )
}

fn monomial(y: &[f64], idx: &[usize]) -> f64 {
    y.iter()
        .zip(idx)
        .map(|(v, &e)| v.powi(e as i32))
        .product()
}

/// `int_0^1 psi_c(t) t^a dt` by Gauss–Jacobi with the power absorbed into
/// the rule; `panels > 1` splits the interval first (an independent node
/// layout for recertification).
fn bump_radial_integral(c: f64, a: f64, order: usize, panels: usize) -> Result<f64> {
    let bump = |t: f64| {
        if t < 1.0 {
            (-c / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    for p in 0..panels {
        let lo = p as f64 / panels as f64;
        let hi = (p + 1) as f64 / panels as f64;
        if lo == 0.0 {
            // t = hi (1+x)/2, absorb t^a into GJ(0, a)
            let gj = gauss_jacobi(order, 0.0, a)?;
            let half = 0.5 * hi;
            total += gj
                .nodes
                .iter()
                .zip(&gj.weights)
                .map(|(&x, &w)| w * bump(half * (x + 1.0)))
                .sum::<f64>()
                * half.powf(a + 1.0);
        } else {
            let gl = gauss_legendre(order)?;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            total += gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .map(|(&x, &w)| {
                    let t = half * x + mid;
                    w * bump(t) * t.powf(a)
                })
                .sum::<f64>()
                * half;
        }
    }
    Ok(total)
}

/// Weighted moment of one basis term against the monomial `ell`, via the
/// exact polar separation of bump-times-monomial profiles:
/// radial bump integral times a closed-form sphere moment.
fn basis_moment(
    ctx: &MeasureContext,
    profile: &Profile,
    term: &ProfileTerm,
    ell: &[usize],
    r: f64,
    radial_order: usize,
    panels: usize,
) -> Result<f64> {
    let hd = ctx.weight().homogeneous_dimension();
    let ell_total: usize = ell.iter().sum();
    let a = (term.total_degree() + ell_total) as f64 + hd - 1.0;
    let radial = bump_radial_integral(profile.bump_sharpness, a, radial_order, panels)?;
    let combined: Vec<usize> = term.degrees.iter().zip(ell).map(|(d, l)| d + l).collect();
    let angular = ctx.angular_signed_monomial(&combined)?;
    Ok(r.powf(ell_total as f64 + hd) * radial * angular)
}

/// All moment multi-indices of total degree `<= s` in dimension `d`.
fn moment_indices(d: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    match d {
        1 => {
            for m in 0..=s {
                out.push(vec![m]);
            }
        }
        2 => {
            for total in 0..=s {
                for a in 0..=total {
                    out.push(vec![a, total - a]);
                }
            }
        }
        _ => {}
    }
    out
}

/// Construct an atom for `spec`: solve the weighted-moment system, then
/// rescale to the sup-norm size condition with equality.
pub fn construct(ctx: &MeasureContext, spec: &AtomSpec) -> Result<Atom> {
    let d = ctx.weight().dimension();
    let n_check = cancellation_order(spec.p, ctx.weight().gamma(), d)?;
    if n_check != spec.n_moment {
        return Err(Error::Construction(format!(
            "spec stores N = {}, but (p, gamma, d) give N = {n_check}",
            spec.n_moment
        )));
    }
    let profile = Profile::for_seed(d, spec.s, spec.seed)?;
    let r = spec.radius;
    let hd = ctx.weight().homogeneous_dimension();
    let radial_order = 240;

    // constraint rows: forced moments (scaled by r^(|ell|+hd), which makes
    // the system radius-independent), then the normalized moment
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let scale = |idx: &[usize]| r.powf(idx.iter().sum::<usize>() as f64 + hd);
    for idx in moment_indices(d, spec.s) {
        let row: Vec<f64> = profile
            .terms
            .iter()
            .map(|term| {
                basis_moment(ctx, &profile, term, &idx, r, radial_order, 1)
                    .map(|m| m / scale(&idx))
            })
            .collect::<Result<_>>()?;
        // parity-forced zeros contribute nothing; drop their rows
        let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-9 {
            rows.push(row);
            rhs.push(0.0);
        }
    }
    {
        let idx = profile.normalized_moment.clone();
        let row: Vec<f64> = profile
            .terms
            .iter()
            .map(|term| {
                basis_moment(ctx, &profile, term, &idx, r, radial_order, 1)
                    .map(|m| m / scale(&idx))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
        rhs.push(1.0);
    }
    if rows.len() != profile.terms.len() {
        return Err(Error::Construction(format!(
            "profile gives {} active constraints for {} basis terms",
            rows.len(),
            profile.terms.len()
        )));
    }
    let coefficients = solve_dense(rows, rhs)?;

    // sup-norm over the support: 1-D search along the peak ray
    let sup0 = radial_sup(&profile, &coefficients, r);
    if !(sup0 > 0.0) {
        return Err(Error::Construction("constructed profile vanishes".into()));
    }
    let ball = ctx.ball_volume(r)?;
    let target = ball.powf(-1.0 / spec.p);
    let s_factor = target / sup0;
    let coefficients: Vec<f64> = coefficients.iter().map(|c| c * s_factor).collect();

    // the normalized moment pre-scaling equals the scale(idx) factor
    let active_moment_value = s_factor * scale(&profile.normalized_moment);
    let first_active_degree = profile.normalized_moment.iter().sum();

    let mut atom = Atom {
        spec: spec.clone(),
        profile,
        coefficients,
        sup_norm: target,
        moment_certificates: Vec::new(),
        first_active_degree,
        active_moment_value,
    };
    let cert = verify(ctx, &atom)?;
    if !cert.passed {
        return Err(Error::Certification(format!(
            "constructed atom failed recertification: {cert:?}"
        )));
    }
    atom.moment_certificates = cert.moments;
    Ok(atom)
}

fn radial_sup(profile: &Profile, coefficients: &[f64], r: f64) -> f64 {
    // dense scan plus golden-section refinement around the best sample
    let n = 4001;
    let mut best_t = 0.0;
    let mut best = 0.0;
    for i in 0..n {
        let t = r * (i as f64 + 0.5) / n as f64;
        let v = profile.radial_magnitude(coefficients, r, t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let mut lo = (best_t - r / n as f64).max(0.0);
    let mut hi = (best_t + r / n as f64).min(r);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if profile.radial_magnitude(coefficients, r, m1)
            < profile.radial_magnitude(coefficients, r, m2)
        {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let t = 0.5 * (lo + hi);
    profile.radial_magnitude(coefficients, r, t).max(best)
}

/// Re-certify all three atom conditions with independently built,
/// higher-order quadrature. In d = 1 the moments run through the tensor box
/// rule (a genuinely different integration path from the polar separation
/// used by the construction); in d = 2 through the separation at a higher
/// order with a split radial layout. Failures are data, not errors.
pub fn verify(ctx: &MeasureContext, atom: &Atom) -> Result<AtomCertificate> {
    let d = ctx.weight().dimension();
    let r = atom.spec.radius;
    let ball = ctx.ball_volume(r)?;

    // (i) compact support: the profile vanishes outside the ball by
    // construction; spot-check a ring just outside
    let mut support_ok = true;
    for i in 0..16 {
        let theta = i as f64 * 0.3927;
        let y: Vec<f64> = match d {
            1 => vec![r * 1.0001 * if i % 2 == 0 { 1.0 } else { -1.0 }],
            _ => vec![r * 1.0001 * theta.cos(), r * 1.0001 * theta.sin()],
        };
        if atom.eval(&y) != 0.0 {
            support_ok = false;
        }
    }

    // (ii) size condition with the sup recomputed independently
    let sup = radial_sup(&atom.profile, &atom.coefficients, r);
    let size_bound = ball.powf(-1.0 / atom.spec.p);
    let size_ok = sup <= size_bound * (1.0 + 1e-12);

    // (iii) moment residuals against the scaled threshold
    let box_rule = if d == 1 {
        Some(moment_rule(ctx, r, 170)?)
    } else {
        None
    };
    let mut moments = Vec::new();
    let mut all_ok = true;
    for idx in moment_indices(d, atom.spec.s) {
        let value = match &box_rule {
            Some(rule) => ctx.integrate(rule, |y| atom.eval(y) * monomial(y, &idx))?,
            None => {
                let mut acc = 0.0;
                for (c, term) in atom.coefficients.iter().zip(&atom.profile.terms) {
                    acc += c * basis_moment(ctx, &atom.profile, term, &idx, r, 360, 2)?;
                }
                acc
            }
        };
        let threshold =
            1e-9 * atom.sup_norm * ball * r.powi(idx.iter().sum::<usize>() as i32);
        let ok = value.abs() <= threshold;
        all_ok &= ok;
        moments.push(MomentCertificate {
            multi_index: idx,
            residual: value.abs(),
            threshold,
            ok,
        });
    }

    Ok(AtomCertificate {
        support_ok,
        sup_norm: sup,
        size_bound,
        size_ok,
        passed: support_ok && size_ok && all_ok,
        moments,
    })
}

/// Weighted moment of a constructed atom against the monomial `ell`, via
/// the same polar separation the construction uses.
pub fn atom_moment(ctx: &MeasureContext, atom: &Atom, ell: &[usize]) -> Result<f64> {
    let mut acc = 0.0;
    for (c, term) in atom.coefficients.iter().zip(&atom.profile.terms) {
        acc += c * basis_moment(ctx, &atom.profile, term, ell, atom.spec.radius, 280, 1)?;
    }
    Ok(acc)
}

/// Dense LU solve with partial pivoting for the small moment systems.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.len();
    for &ref row in &a {
        if row.len() != n {
            return Err(Error::Construction("moment system is not square".into()));
        }
    }
    for col in 0..n {
        let (pivot, pmax) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pmax < 1e-13 {
            return Err(Error::Construction(
                "singular moment system (degenerate monomial family)".into(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Ok(x)
}
