//! Transform-level properties on the atom corpus: the uniform bound through
//! `|E_k| <= 1`, moment-driven decay at the origin, Gaussian fixed point,
//! and Plancherel self-validation.

mod common;

use dunkl_core::atoms::{construct, AtomSpec};
use dunkl_core::measure::MeasureContext;
use dunkl_core::root_system::{MultiplicityFunction, Preset, RootSystemData, WeightContext};
use dunkl_core::transform::TransformPlan;

fn measure(d: usize, ks: Vec<f64>) -> MeasureContext {
    let sys = RootSystemData::build(Preset::Z2Product, d).unwrap();
    let w = WeightContext::new(sys, MultiplicityFunction::new(ks).unwrap()).unwrap();
    MeasureContext::new(w).unwrap()
}

#[test]
fn uniform_bound_on_atom_corpus() {
    for (d, ks, p) in [
        (1usize, vec![0.0], 1.0),
        (1, vec![1.0], 2.0 / 3.0),
        (2, vec![0.5, 0.5], 1.0),
    ] {
        let ctx = measure(d, ks);
        for seed in [0u32, 2] {
            for r in [0.5f64, 2.0] {
                let spec = AtomSpec::new(&ctx, p, r, seed).unwrap();
                let atom = construct(&ctx, &spec).unwrap();
                let plan = TransformPlan::for_max_frequency(ctx.clone(), r, 30.0 / r).unwrap();
                let prepared = plan.prepare(|y| atom.eval(y)).unwrap();
                let bound = ctx.mehta_constant() * prepared.abs_moment(0.0);
                for i in 1..=30 {
                    let rho = i as f64 * (25.0 / r) / 30.0;
                    let v = prepared.eval_on_axis(rho).unwrap().norm();
                    assert!(
                        v <= bound * (1.0 + 1e-10),
                        "d={d}, seed={seed}, r={r}, rho={rho}: {v} > {bound}"
                    );
                }
            }
        }
    }
}

#[test]
fn moment_decay_slope_near_origin() {
    // atoms with N vanishing moments: log|F| vs log|x| slope >= N+1 - 0.05
    // on |x| in [1e-3, 1e-1]
    for (d, ks, p, seed, min_slope) in [
        (1usize, vec![0.0], 1.0, 0u32, 1.0),        // N = 0, first moment active
        (1, vec![0.0], 1.0, 2, 2.0),                // opposite parity: slope 2
        (1, vec![1.0], 2.0 / 3.0, 0, 2.0),          // N = 1, slope 2
        (2, vec![0.5, 0.5], 1.0, 0, 1.0),           // N = 0 probe
    ] {
        let ctx = measure(d, ks);
        let spec = AtomSpec::new(&ctx, p, 1.0, seed).unwrap();
        let atom = construct(&ctx, &spec).unwrap();
        let plan = TransformPlan::new(ctx.clone(), 1.0, 40).unwrap();
        let prepared = plan.prepare(|y| atom.eval(y)).unwrap();
        let mut pts = Vec::new();
        for i in 0..=24 {
            let rho = 1e-3 * (1e-1f64 / 1e-3).powf(i as f64 / 24.0);
            let v = prepared.eval_on_axis(rho).unwrap().norm();
            pts.push((rho.ln(), v.ln()));
        }
        let slope = common::slope(&pts);
        assert!(
            slope >= min_slope - 0.05,
            "d={d}, seed={seed}: decay slope {slope} < {min_slope} - 0.05"
        );
    }
}

#[test]
fn gaussian_fixed_point_both_weights() {
    for &k in &[0.0, 0.8] {
        let ctx = measure(1, vec![k]);
        let plan = TransformPlan::for_max_frequency(ctx, 12.0, 4.5).unwrap();
        let prepared = plan.prepare(|y| (-0.5 * y[0] * y[0]).exp()).unwrap();
        for i in 0..=16 {
            let x = 0.25 * i as f64;
            let v = prepared.eval(&[x]).unwrap();
            let expected = (-0.5 * x * x).exp();
            assert!(
                (v.re - expected).abs() <= 1e-6 * expected,
                "k={k}, x={x}: {} vs {expected}",
                v.re
            );
            assert!(v.im.abs() <= 1e-9);
        }
    }
}

#[test]
fn plancherel_on_atoms() {
    // self-consistency of the frequency-side norm at harness orders
    for (d, ks, p, tol) in [
        (1usize, vec![0.0], 1.0, 1e-4),
        (1, vec![1.0], 2.0 / 3.0, 1e-3),
    ] {
        let ctx = measure(d, ks);
        let spec = AtomSpec::new(&ctx, p, 1.0, 0).unwrap();
        let atom = construct(&ctx, &spec).unwrap();
        let plan = TransformPlan::for_max_frequency(ctx, 1.0, 400.0).unwrap();
        let defect = plan.plancherel_defect(|y| atom.eval(y)).unwrap();
        assert!(defect <= tol, "d={d}, p={p}: Plancherel defect {defect}");
    }
}

#[test]
fn classical_parseval_oracle() {
    // d=1, k=0: compare the frequency-side norm against a fine classical
    // Fourier computation of the same bump
    let ctx = measure(1, vec![0.0]);
    let plan = TransformPlan::for_max_frequency(ctx.clone(), 1.0, 400.0).unwrap();
    let bump = |y: &[f64]| {
        let t = y[0];
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    };
    let defect = plan.plancherel_defect(bump).unwrap();
    assert!(defect <= 1e-4, "defect {defect}");

    // independent route: ||f||^2 by Simpson, F by Simpson on a grid
    let n = 20_000;
    let h = 2.0 / n as f64;
    let mut source = 0.0;
    for i in 0..=n {
        let t = -1.0 + i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        source += w * bump(&[t]).powi(2);
    }
    source *= h / 3.0;
    let prepared = plan.prepare(bump).unwrap();
    let sq = prepared.source_norm_sq();
    assert!(
        (sq - source).abs() <= 1e-8 * source,
        "source norms disagree: {sq} vs {source}"
    );
}
