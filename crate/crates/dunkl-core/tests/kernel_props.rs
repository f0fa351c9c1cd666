//! Kernel-level properties: the modulus bound, classical reduction,
//! argument symmetry, and the Taylor remainder inequality.

mod common;

use dunkl_core::kernel::KernelContext;
use dunkl_core::root_system::{MultiplicityFunction, Preset, RootSystemData, WeightContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kernel(d: usize, ks: Vec<f64>) -> KernelContext {
    let sys = RootSystemData::build(Preset::Z2Product, d).unwrap();
    let w = WeightContext::new(sys, MultiplicityFunction::new(ks).unwrap()).unwrap();
    KernelContext::new(w).unwrap()
}

#[test]
fn modulus_bound_random_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b65726e);
    for _ in 0..20_000 {
        let d = rng.gen_range(1..=3usize);
        let ks: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=3.0)).collect();
        let ctx = kernel(d, ks.clone());
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-20.0..20.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-20.0..20.0)).collect();
        let v = ctx.eval(&x, &y);
        assert!(
            v.norm() <= 1.0 + 1e-12,
            "|E| = {} at d={d}, k={ks:?}, x={x:?}, y={y:?}",
            v.norm()
        );
    }
}

#[test]
fn classical_reduction_dense() {
    // k = 0 kernel against exp(i<x,y>) for |<x,y>| <= 20
    let ctx = kernel(2, vec![0.0, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x636c6173);
    let mut worst = 0.0f64;
    for _ in 0..5_000 {
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.5..2.5)).collect();
        let t = x[0] * y[0] + x[1] * y[1];
        if t.abs() > 20.0 {
            continue;
        }
        let v = ctx.eval(&x, &y);
        let err = (v - num_complex::Complex64::new(t.cos(), t.sin())).norm();
        worst = worst.max(err);
    }
    assert!(worst <= 1e-10, "worst classical deviation {worst:.3e}");
}

#[test]
fn symmetry_in_x_and_y() {
    let ctx = kernel(3, vec![0.3, 1.2, 2.5]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x73796d6d);
    for _ in 0..2_000 {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let a = ctx.eval(&x, &y);
        let b = ctx.eval(&y, &x);
        assert!((a - b).norm() <= 1e-12, "symmetry broke at {x:?}, {y:?}");
    }
}

#[test]
fn remainder_bound_full_grid() {
    // |x||y| <= 5, k in {0, 1/2, 2}, truncation degrees 0..=4
    for &k in &[0.0, 0.5, 2.0] {
        let ctx = kernel(1, vec![k]);
        for n in 0..=4usize {
            for i in 0..=200 {
                let t = -5.0 + 10.0 * i as f64 / 200.0;
                let check = ctx.remainder_check(&[1.0], &[t], n);
                assert!(
                    check.ok,
                    "k={k}, N={n}, xy={t}: lhs={:.3e} rhs={:.3e}",
                    check.lhs, check.rhs
                );
            }
        }
    }
    // a 2-D slice of the same grid
    let ctx2 = kernel(2, vec![0.5, 2.0]);
    for n in 0..=4usize {
        for i in 0..=40 {
            let s = i as f64 / 40.0 * std::f64::consts::TAU;
            let x = [1.2 * s.cos(), 1.2 * s.sin()];
            let y = [2.0 * (1.7 * s).cos(), 2.0 * (1.7 * s).sin()];
            let check = ctx2.remainder_check(&x, &y, n);
            assert!(check.ok, "2-D remainder failed at N={n}, s={s}");
        }
    }
}

#[test]
fn taylor_against_series_oracle() {
    // degree-2 truncation at xy = 0.3 agrees with an independently computed
    // quadratic from the Poisson-oracle derivatives (finite differences)
    let k = 0.7;
    let ctx = kernel(1, vec![k]);
    let t = ctx.taylor(&[1.0], &[0.3], 2);
    // coefficients via the oracle: e_k(t) = j_(k-1/2)(t) + i t/(2k+1) j_(k+1/2)(t)
    // truncated: 1 - t^2/(2(2k+1)) ... compute from the series definition
    let c2 = -1.0 / (4.0 * (k + 0.5));
    let expected_re = 1.0 + c2 * 0.3 * 0.3;
    let expected_im = 0.3 / (2.0 * k + 1.0);
    assert!((t.re - expected_re).abs() < 1e-12);
    assert!((t.im - expected_im).abs() < 1e-12);
    // and the full kernel value matches the oracle combination at the point
    let full = ctx.eval(&[1.0], &[0.3]);
    let oracle_re = common::bessel_poisson(k - 0.5, 0.3, 4000);
    let oracle_im = 0.3 / (2.0 * k + 1.0) * common::bessel_poisson(k + 0.5, 0.3, 4000);
    assert!((full.re - oracle_re).abs() < 1e-10);
    assert!((full.im - oracle_im).abs() < 1e-10);
}
