//! Temporary development diagnostics; removed before release.

use dunkl_core::atoms::{construct, AtomSpec};
use dunkl_core::hardy::{rho_choice, AtomHarness, HardyOutcome, StripSpec};
use dunkl_core::measure::MeasureContext;
use dunkl_core::root_system::{MultiplicityFunction, Preset, RootSystemData, WeightContext};

fn ctx(d: usize, ks: Vec<f64>) -> MeasureContext {
    let sys = RootSystemData::build(Preset::Z2Product, d).unwrap();
    let w = WeightContext::new(sys, MultiplicityFunction::new(ks).unwrap()).unwrap();
    MeasureContext::new(w).unwrap()
}

#[test]
#[ignore]
fn dev_hardy_single() {
    let ctx = ctx(1, vec![0.0]);
    let strip = StripSpec::new(1.0, 0.0, 1).unwrap();
    for &r in &[0.25f64, 1.0, 4.0] {
        let spec = AtomSpec::new(&ctx, 1.0, r, 0).unwrap();
        let atom = construct(&ctx, &spec).unwrap();
        let t0 = std::time::Instant::now();
        let mut h = AtomHarness::new(ctx.clone(), atom).unwrap();
        for sigma in [1.0, 1.5, 1.95] {
            let total = match h.hardy_integral(sigma).unwrap() {
                HardyOutcome::Value(v) => v,
                HardyOutcome::Divergent(d) => panic!("unexpected divergence {d:?}"),
            };
            let rho = rho_choice(r, &strip, sigma).unwrap();
            let (s1, s2) = h.split(sigma, rho).unwrap();
            println!(
                "r={r} sigma={sigma}: total={total:.6e} s1={s1:.6e} s2={s2:.6e} rho={rho:.3e} \
                 consistency={:.3e} elapsed={:?}",
                (s1 + s2 - total).abs() / total,
                t0.elapsed()
            );
        }
        // divergence probe
        let probe = strip.sigma_max + 0.25;
        match h.hardy_integral(probe).unwrap() {
            HardyOutcome::Divergent(d) => println!(
                "r={r} probe sigma={probe}: measured={:.4} expected={:.4} levels={}",
                d.measured_inner_slope, d.analytic_inner_slope, d.levels_used
            ),
            HardyOutcome::Value(v) => println!("r={r} probe sigma={probe}: VALUE {v:.3e}?!"),
        }
    }
}

#[test]
#[ignore]
fn dev_hardy_k1() {
    let ctx = ctx(1, vec![1.0]);
    let p = 2.0 / 3.0;
    let strip = StripSpec::new(p, 1.0, 1).unwrap();
    println!(
        "strip: [{}, {}) N={}",
        strip.sigma_min, strip.sigma_max, strip.n_moment
    );
    for &r in &[0.5f64, 2.0] {
        let spec = AtomSpec::new(&ctx, p, r, 0).unwrap();
        let atom = construct(&ctx, &spec).unwrap();
        let t0 = std::time::Instant::now();
        let mut h = AtomHarness::new(ctx.clone(), atom).unwrap();
        for sigma in [strip.sigma_min, 0.5 * (strip.sigma_min + strip.sigma_max)] {
            let total = match h.hardy_integral(sigma).unwrap() {
                HardyOutcome::Value(v) => v,
                HardyOutcome::Divergent(d) => panic!("unexpected divergence {d:?}"),
            };
            let rho = rho_choice(r, &strip, sigma).unwrap();
            let (s1, s2) = h.split(sigma, rho).unwrap();
            println!(
                "r={r} sigma={sigma:.4}: total={total:.6e} s1={s1:.6e} s2={s2:.6e} \
                 cons={:.3e} elapsed={:?}",
                (s1 + s2 - total).abs() / total,
                t0.elapsed()
            );
        }
    }
}

#[test]
#[ignore]
fn dev_hardy_d2() {
    let ctx = ctx(2, vec![0.5, 0.5]);
    let strip = StripSpec::new(1.0, 1.0, 2).unwrap();
    println!(
        "strip: [{}, {}) N={}",
        strip.sigma_min, strip.sigma_max, strip.n_moment
    );
    for &seed in &[0u32, 2] {
        for &r in &[0.5f64, 2.0] {
            let spec = AtomSpec::new(&ctx, 1.0, r, seed).unwrap();
            let atom = construct(&ctx, &spec).unwrap();
            let t0 = std::time::Instant::now();
            let mut h = AtomHarness::new(ctx.clone(), atom).unwrap();
            let sigma = 0.5 * (strip.sigma_min + strip.sigma_max);
            let total = match h.hardy_integral(sigma).unwrap() {
                HardyOutcome::Value(v) => v,
                HardyOutcome::Divergent(d) => panic!("unexpected divergence {d:?}"),
            };
            let rho = rho_choice(r, &strip, sigma).unwrap();
            let (s1, s2) = h.split(sigma, rho).unwrap();
            println!(
                "seed={seed} r={r} sigma={sigma:.3}: total={total:.6e} s1={s1:.6e} s2={s2:.6e} \
                 cons={:.3e} elapsed={:?}",
                (s1 + s2 - total).abs() / total,
                t0.elapsed()
            );
        }
    }
}

#[test]
#[ignore]
fn dev_kernel_paths() {
    use dunkl_core::kernel::KernelContext;
    use dunkl_core::specfun::{normalized_bessel_asymptotic, normalized_bessel_series};
    // compare e_k against the reference series/asymptotic combination
    for k in [0.5f64, 1.0, 2.0, 3.0] {
        let sys = RootSystemData::build(Preset::Z2Product, 1).unwrap();
        let w = WeightContext::new(sys, MultiplicityFunction::new(vec![k]).unwrap()).unwrap();
        let kc = KernelContext::new(w).unwrap();
        let mut worst = (0.0f64, 0.0f64);
        for i in 1..4000 {
            let t = 0.05 * i as f64;
            let reference = {
                let jl = if t <= 30.0 {
                    normalized_bessel_series(k - 0.5, t, 8)
                } else {
                    normalized_bessel_asymptotic(k - 0.5, t)
                };
                let ju = if t <= 30.0 {
                    normalized_bessel_series(k + 0.5, t, 8)
                } else {
                    normalized_bessel_asymptotic(k + 0.5, t)
                };
                (jl, t / (2.0 * k + 1.0) * ju)
            };
            let got = kc.axis_eval(0, t);
            let err = ((got.re - reference.0).abs()).max((got.im - reference.1).abs());
            if err > worst.1 {
                worst = (t, err);
            }
        }
        println!("k={k}: worst abs err {:.3e} at t={}", worst.1, worst.0);
    }
}

#[test]
#[ignore]
fn dev_plan_order_consistency() {
    use dunkl_core::transform::TransformPlan;
    // same atom, increasing plan orders: forward values must agree
    let ctx = ctx(1, vec![1.0]);
    let spec = AtomSpec::new(&ctx, 2.0 / 3.0, 0.5, 0).unwrap();
    let atom = construct(&ctx, &spec).unwrap();
    let mut per_order = Vec::new();
    for order in [60usize, 200, 800, 2600] {
        let plan = TransformPlan::new(ctx.clone(), 0.5, order).unwrap();
        let prep = plan.prepare(|y| atom.eval(y)).unwrap();
        let mut vals = Vec::new();
        for rho in [0.5f64, 3.0, 11.0, 31.0, 60.0] {
            vals.push(prep.eval_on_axis(rho).unwrap());
        }
        per_order.push((order, vals));
    }
    let reference = per_order.last().unwrap().1.clone();
    for (order, vals) in &per_order {
        let worst: f64 = vals
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        println!("order {order}: worst deviation {worst:.3e}");
    }
    // also check raw weight sums at large order: integral of w_k over [-r, r]
    for order in [60usize, 800, 2600] {
        let plan = TransformPlan::new(ctx.clone(), 0.5, order).unwrap();
        let prep = plan.prepare(|_| 1.0).unwrap();
        let v = prep.eval_on_axis(0.0).unwrap();
        let exact = ctx.ball_volume(0.5).unwrap() * ctx.mehta_constant();
        println!("order {order}: mass = {} (exact {exact})", v.re);
    }
}

#[test]
#[ignore]
fn dev_sweep_small() {
    use dunkl_core::exec::Parallelism;
    use dunkl_core::hardy::{sweep, CellConfig, StripSpec, SweepConfig};
    use dunkl_core::report::{summarize, to_csv};
    use std::collections::BTreeMap;

    let config = SweepConfig {
        cells: vec![CellConfig {
            label: "d1-k0-p1".into(),
            d: 1,
            preset: Preset::Z2Product,
            multiplicities: vec![0.0],
            p: 1.0,
        }],
        sigma_grid: 5,
        outside_probes: true,
        radii_exponents: (-3..=3).collect(),
        seeds: vec![0, 2],
    };
    let t0 = std::time::Instant::now();
    let reports = sweep(&config, Parallelism::Auto).unwrap();
    println!("{} reports in {:?}", reports.len(), t0.elapsed());
    let mut strips = BTreeMap::new();
    strips.insert(
        "d1-k0-p1".to_string(),
        StripSpec::new(1.0, 0.0, 1).unwrap(),
    );
    let summary = summarize(&reports, &strips);
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    let csv = to_csv(&reports);
    println!("{}", &csv[..csv.len().min(800)]);
}
