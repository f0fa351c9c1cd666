//! Normalized root systems, reflections, multiplicity functions, the index
//! `gamma`, and the reflection-invariant weight `w_k`.
//!
//! Every root is rescaled to `|alpha|^2 = 2` at construction. The positive
//! subsystem is selected by the fixed generic functional
//! `(1, eps, eps^2, ...)` with `eps = 1e-4`, so it is deterministic.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Supported root-system presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Preset {
    /// Coordinate-hyperplane system `{±sqrt2 e_j}`; one orbit per axis.
    Z2Product,
    /// The rank-one system, embedded in d = 1; identical to `Z2Product` there.
    A1,
    /// Dihedral system with `order` mirror lines in d = 2; `order` must be
    /// even so that there are exactly two orbits.
    Dihedral { order: usize },
}

/// A normalized root system: roots, the positive subsystem, orbit labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSystemData {
    pub dimension: usize,
    /// All roots, each with squared length 2.
    pub roots: Vec<Vec<f64>>,
    /// Indices into `roots` forming the positive subsystem.
    pub positive_roots: Vec<usize>,
    /// Orbit label of each root under the reflection group.
    pub orbit_id: Vec<usize>,
    pub n_orbits: usize,
}

/// Reflection of `y` in the hyperplane orthogonal to `alpha`.
pub fn reflect(alpha: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let norm2: f64 = alpha.iter().map(|a| a * a).sum();
    if norm2 == 0.0 {
        return Err(Error::Domain("cannot reflect in a zero vector".into()));
    }
    let dot: f64 = alpha.iter().zip(y).map(|(a, b)| a * b).sum();
    let c = 2.0 * dot / norm2;
    Ok(y.iter().zip(alpha).map(|(yi, ai)| yi - c * ai).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl RootSystemData {
    /// Build a preset system in dimension `d`.
    pub fn build(preset: Preset, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        let sqrt2 = 2f64.sqrt();
        let (roots, orbit_id): (Vec<Vec<f64>>, Vec<usize>) = match preset {
            Preset::Z2Product => {
                let mut roots = Vec::with_capacity(2 * d);
                let mut orbits = Vec::with_capacity(2 * d);
                for j in 0..d {
                    for sign in [1.0, -1.0] {
                        let mut v = vec![0.0; d];
                        v[j] = sign * sqrt2;
                        roots.push(v);
                        orbits.push(j);
                    }
                }
                (roots, orbits)
            }
            Preset::A1 => {
                if d != 1 {
                    return Err(Error::Config(format!(
                        "A1 preset requires d = 1, got d = {d}"
                    )));
                }
                (vec![vec![sqrt2], vec![-sqrt2]], vec![0, 0])
            }
            Preset::Dihedral { order: m } => {
                if d != 2 {
                    return Err(Error::Config(format!(
                        "dihedral preset requires d = 2, got d = {d}"
                    )));
                }
                if m < 2 || m % 2 != 0 {
                    return Err(Error::Config(format!(
                        "dihedral preset requires an even order >= 2, got {m}"
                    )));
                }
                let mut roots = Vec::with_capacity(2 * m);
                let mut orbits = Vec::with_capacity(2 * m);
                for i in 0..m {
                    let theta = std::f64::consts::PI * i as f64 / m as f64;
                    for sign in [1.0, -1.0] {
                        roots.push(vec![
                            sign * sqrt2 * theta.cos(),
                            sign * sqrt2 * theta.sin(),
                        ]);
                        orbits.push(i % 2);
                    }
                }
                (roots, orbits)
            }
        };

        // generic functional for the positive subsystem
        let eps = 1e-4f64;
        let functional: Vec<f64> = (0..d).map(|j| eps.powi(j as i32)).collect();
        let mut positive = Vec::new();
        for (i, r) in roots.iter().enumerate() {
            let s = dot(&functional, r);
            if s.abs() < 1e-12 {
                return Err(Error::Config(
                    "selection functional is not generic for this system".into(),
                ));
            }
            if s > 0.0 {
                positive.push(i);
            }
        }

        let n_orbits = orbit_id.iter().copied().max().unwrap_or(0) + 1;
        let data = RootSystemData {
            dimension: d,
            roots,
            positive_roots: positive,
            orbit_id,
            n_orbits,
        };
        data.check_axioms()?;
        Ok(data)
    }

    /// Verify the root-system axioms: normalization, `R ∩ R.alpha = {±alpha}`,
    /// closure under reflections, and that the positive subsystem picks one
    /// root per pair.
    pub fn check_axioms(&self) -> Result<()> {
        let tol = 1e-12;
        for r in &self.roots {
            let n2: f64 = r.iter().map(|x| x * x).sum();
            if (n2 - 2.0).abs() > tol {
                return Err(Error::Config(format!("root {r:?} has |alpha|^2 = {n2}")));
            }
        }
        for (i, r) in self.roots.iter().enumerate() {
            let neg: Vec<f64> = r.iter().map(|x| -x).collect();
            if self.find_root(&neg, tol).is_none() {
                return Err(Error::Config(format!("root {i} lacks its negative")));
            }
            // no scalar multiple other than -alpha
            for (j, s) in self.roots.iter().enumerate() {
                if i == j {
                    continue;
                }
                if parallel(r, s, tol) && s.iter().zip(r).any(|(a, b)| (a + b).abs() > tol) {
                    return Err(Error::Config(format!(
                        "roots {i} and {j} are parallel but not opposite"
                    )));
                }
            }
        }
        for alpha in &self.roots {
            for beta in &self.roots {
                let image = reflect(alpha, beta)?;
                if self.find_root(&image, 1e-9).is_none() {
                    return Err(Error::Config(
                        "system is not closed under its own reflections".into(),
                    ));
                }
            }
        }
        if 2 * self.positive_roots.len() != self.roots.len() {
            return Err(Error::Config(
                "positive subsystem does not split the root pairs".into(),
            ));
        }
        Ok(())
    }

    fn find_root(&self, v: &[f64], tol: f64) -> Option<usize> {
        self.roots.iter().position(|r| {
            r.iter()
                .zip(v)
                .all(|(a, b)| (a - b).abs() <= tol * (1.0 + a.abs()))
        })
    }

    /// For `Z2Product`/`A1` systems, the orbit label of each coordinate axis.
    fn axis_orbits(&self) -> Option<Vec<usize>> {
        if self.roots.len() != 2 * self.dimension {
            return None;
        }
        let sqrt2 = 2f64.sqrt();
        let mut orbits = Vec::with_capacity(self.dimension);
        for j in 0..self.dimension {
            let mut axis = vec![0.0; self.dimension];
            axis[j] = sqrt2;
            let idx = self.find_root(&axis, 1e-12)?;
            orbits.push(self.orbit_id[idx]);
        }
        Some(orbits)
    }
}

fn parallel(a: &[f64], b: &[f64], tol: f64) -> bool {
    // rank-1 test on the pair: all 2x2 minors vanish
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if (a[i] * b[j] - a[j] * b[i]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Multiplicity function: one nonnegative value per orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityFunction {
    pub values: Vec<f64>,
}

impl MultiplicityFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&k| !k.is_finite() || k < 0.0) {
            return Err(Error::Config(format!(
                "multiplicities must be finite and >= 0, got {values:?}"
            )));
        }
        Ok(MultiplicityFunction { values })
    }

    pub fn constant(k: f64, n_orbits: usize) -> Result<Self> {
        Self::new(vec![k; n_orbits])
    }
}

/// A root system paired with a multiplicity function; carries the index
/// `gamma` and evaluates the weight `w_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightContext {
    pub root_system: RootSystemData,
    pub multiplicity: MultiplicityFunction,
    gamma: f64,
    /// Per-axis multiplicities when the system is a coordinate product.
    axis_k: Option<Vec<f64>>,
}

impl WeightContext {
    pub fn new(root_system: RootSystemData, multiplicity: MultiplicityFunction) -> Result<Self> {
        if multiplicity.values.len() != root_system.n_orbits {
            return Err(Error::Config(format!(
                "expected {} multiplicity values (one per orbit), got {}",
                root_system.n_orbits,
                multiplicity.values.len()
            )));
        }
        let gamma = root_system
            .positive_roots
            .iter()
            .map(|&i| multiplicity.values[root_system.orbit_id[i]])
            .sum();
        let axis_k = root_system
            .axis_orbits()
            .map(|orbits| orbits.iter().map(|&o| multiplicity.values[o]).collect());
        Ok(WeightContext {
            root_system,
            multiplicity,
            gamma,
            axis_k,
        })
    }

    /// The index `gamma`: the multiplicity sum over positive roots.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Homogeneity degree of `w_k`, namely `2 gamma`.
    pub fn homogeneity_degree(&self) -> f64 {
        2.0 * self.gamma
    }

    pub fn dimension(&self) -> usize {
        self.root_system.dimension
    }

    /// `2 gamma + d`, the homogeneous dimension of the weighted measure.
    pub fn homogeneous_dimension(&self) -> f64 {
        2.0 * self.gamma + self.root_system.dimension as f64
    }

    /// Per-axis multiplicities `k_j` when the system is a coordinate
    /// product (`Z2Product`/`A1`); `None` otherwise.
    pub fn axis_multiplicities(&self) -> Option<&[f64]> {
        self.axis_k.as_deref()
    }

    /// The weight `w_k(y)`: product over positive roots of
    /// `|<alpha, y>|^(2 k(alpha))`.
    pub fn weight_eval(&self, y: &[f64]) -> f64 {
        let mut w = 1.0;
        for &i in &self.root_system.positive_roots {
            let k = self.multiplicity.values[self.root_system.orbit_id[i]];
            if k == 0.0 {
                continue;
            }
            let t = dot(&self.root_system.roots[i], y).abs();
            w *= t.powf(2.0 * k);
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_presets() {
        let r1 = RootSystemData::build(Preset::Z2Product, 1).unwrap();
        assert_eq!(r1.roots.len(), 2);
        assert_eq!(r1.positive_roots.len(), 1);
        let a1 = RootSystemData::build(Preset::A1, 1).unwrap();
        assert_eq!(a1.roots, r1.roots);

        let r2 = RootSystemData::build(Preset::Z2Product, 2).unwrap();
        assert_eq!(r2.roots.len(), 4);
        assert_eq!(r2.n_orbits, 2);
    }

    #[test]
    fn dihedral_even_only() {
        let d6 = RootSystemData::build(Preset::Dihedral { order: 6 }, 2).unwrap();
        assert_eq!(d6.roots.len(), 12);
        assert_eq!(d6.n_orbits, 2);
        assert!(RootSystemData::build(Preset::Dihedral { order: 5 }, 2).is_err());
        assert!(RootSystemData::build(Preset::Dihedral { order: 6 }, 3).is_err());
        assert!(RootSystemData::build(Preset::Z2Product, 0).is_err());
    }

    #[test]
    fn reflect_examples() {
        let alpha = [2f64.sqrt(), 0.0];
        let y = [3.0, 5.0];
        assert_eq!(reflect(&alpha, &y).unwrap(), vec![-3.0, 5.0]);
        // perpendicular vectors are fixed
        let z = [0.0, 7.0];
        assert_eq!(reflect(&alpha, &z).unwrap(), vec![0.0, 7.0]);
        assert!(reflect(&[0.0, 0.0], &y).is_err());
    }

    #[test]
    fn weight_direct_value() {
        // Z2^2, k = (1, 0), y = (2, 3): |sqrt2 * 2|^2 = 8
        let sys = RootSystemData::build(Preset::Z2Product, 2).unwrap();
        let ctx =
            WeightContext::new(sys, MultiplicityFunction::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!((ctx.weight_eval(&[2.0, 3.0]) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_examples() {
        let sys = RootSystemData::build(Preset::Z2Product, 2).unwrap();
        let ctx = WeightContext::new(
            sys.clone(),
            MultiplicityFunction::new(vec![0.5, 1.5]).unwrap(),
        )
        .unwrap();
        assert_eq!(ctx.gamma(), 2.0);
        let zero =
            WeightContext::new(sys, MultiplicityFunction::constant(0.0, 2).unwrap()).unwrap();
        assert_eq!(zero.gamma(), 0.0);
        let sys3 = RootSystemData::build(Preset::Z2Product, 3).unwrap();
        let ctx3 =
            WeightContext::new(sys3, MultiplicityFunction::constant(1.0, 3).unwrap()).unwrap();
        assert_eq!(ctx3.gamma(), 3.0);
    }

    #[test]
    fn rejects_negative_multiplicity() {
        assert!(MultiplicityFunction::new(vec![0.5, -0.1]).is_err());
    }

    #[test]
    fn axis_multiplicities_only_for_products() {
        let sys = RootSystemData::build(Preset::Z2Product, 2).unwrap();
        let ctx =
            WeightContext::new(sys, MultiplicityFunction::new(vec![0.25, 0.75]).unwrap()).unwrap();
        assert_eq!(ctx.axis_multiplicities(), Some(&[0.25, 0.75][..]));

        let dih = RootSystemData::build(Preset::Dihedral { order: 4 }, 2).unwrap();
        // order-4 dihedral has 8 roots (axes plus diagonals), not a product
        let dctx =
            WeightContext::new(dih, MultiplicityFunction::constant(1.0, 2).unwrap()).unwrap();
        assert_eq!(dctx.axis_multiplicities(), None);
    }
}
