//! `dunkl`: configuration-driven command surface over the core library.
//!
//! Subcommands: `validate` (setup cross-checks), `sweep` (the full
//! weighted-inequality sweep with CSV/JSON reports), `kernel-table`
//! (tabulate the kernel for plotting), `atom-make` (build and serialize an
//! atom corpus).

mod config;

use clap::{Args, Parser, Subcommand};
use config::HarnessConfig;
use dunkl_core::atoms;
use dunkl_core::error::{Error, Result};
use dunkl_core::exec::Parallelism;
use dunkl_core::hardy;
use dunkl_core::kernel::KernelContext;
use dunkl_core::measure::{Domain, MeasureContext};
use dunkl_core::report;
use dunkl_core::root_system::{MultiplicityFunction, Preset, RootSystemData, WeightContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dunkl", version, about = "Dunkl-transform harness")]
struct Cli {
    /// Worker threads for parallel sections (1 = sequential).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the JSON harness configuration.
    #[arg(long)]
    config: PathBuf,
    /// Restrict to cells whose label contains this substring.
    #[arg(long)]
    cells: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run setup diagnostics: root-system axioms, Mehta-constant and
    /// ball-volume cross-checks for every configured cell.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the sweep and write reports.csv + summary.json.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the kernel on a (t, s) grid along coordinate axes:
    /// rows are (t, s, Re E, Im E, modulus) with x = t e1, y = s e1.
    KernelTable {
        /// Dimension.
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Per-axis multiplicities, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.0")]
        k: Vec<f64>,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the atom corpus for the configured cells and serialize it.
    AtomMake {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        #[cfg(feature = "parallel")]
        {
            if n > 1 {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not configure thread pool: {e}");
                }
            }
        }
        let _ = n;
    }
    let parallelism = match cli.threads {
        Some(1) => Parallelism::Sequential,
        _ => Parallelism::Auto,
    };
    match run(cli.command, parallelism) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, parallelism: Parallelism) -> Result<ExitCode> {
    match command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Sweep { config, out } => cmd_sweep(&config, &out, parallelism),
        Command::KernelTable {
            d,
            k,
            min,
            max,
            steps,
            out,
        } => cmd_kernel_table(d, &k, min, max, steps, &out),
        Command::AtomMake { config, out } => cmd_atom_make(&config, &out),
    }
}

fn load(config: &ConfigArgs) -> Result<(HarnessConfig, Vec<hardy::CellConfig>)> {
    let cfg = HarnessConfig::load(&config.config)?;
    let cells = cfg.filtered(config.cells.as_deref())?;
    Ok((cfg, cells))
}

fn cmd_validate(config: &ConfigArgs) -> Result<ExitCode> {
    let (cfg, cells) = load(config)?;
    let order = cfg.quadrature.validate_order;
    let mut failures = 0usize;
    for cell in &cells {
        let ctx = cell.measure_context()?;
        let weight = ctx.weight();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ hash_label(&cell.label));

        // 1. root-system axioms plus randomized weight invariance
        let mut ok_axioms = weight.root_system.check_axioms().is_ok();
        for _ in 0..50 {
            let y: Vec<f64> = (0..cell.d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let lambda: f64 = rng.gen_range(0.1..4.0);
            let scaled: Vec<f64> = y.iter().map(|v| lambda * v).collect();
            let w = weight.weight_eval(&y);
            let hom = weight.weight_eval(&scaled);
            if (hom - lambda.powf(weight.homogeneity_degree()) * w).abs()
                > 1e-10 * hom.abs().max(1e-300)
            {
                ok_axioms = false;
            }
            for root in &weight.root_system.roots {
                let reflected = dunkl_core::root_system::reflect(root, &y)?;
                if (weight.weight_eval(&reflected) - w).abs() > 1e-12 * w.abs().max(1e-300) {
                    ok_axioms = false;
                }
            }
        }

        // 2. Mehta constant: closed form vs quadrature
        let ck = ctx.mehta_constant();
        let ck_quad = ctx.mehta_by_quadrature(order)?;
        let ok_mehta = (ck_quad - ck).abs() <= 1e-8 * ck;

        // 3. ball volumes: closed form vs quadrature
        let mut ok_ball = true;
        if cell.d <= 2 {
            for r in [0.25, 1.0, 4.0] {
                let exact = ctx.ball_volume(r)?;
                let rule = ctx.rule(Domain::Ball { radius: r }, order.max(40))?;
                let quad = ctx.integrate(&rule, |_| 1.0)?;
                if (quad - exact).abs() > 1e-8 * exact {
                    ok_ball = false;
                }
            }
        }

        for (name, ok) in [
            ("root-system-axioms", ok_axioms),
            ("mehta-constant", ok_mehta),
            ("ball-volume", ok_ball),
        ] {
            println!(
                "{} {name}: {}",
                cell.label,
                if ok { "pass" } else { "FAIL" }
            );
            if !ok {
                failures += 1;
            }
        }
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_sweep(config: &ConfigArgs, out: &PathBuf, parallelism: Parallelism) -> Result<ExitCode> {
    let (cfg, cells) = load(config)?;
    let sweep_config = cfg.sweep_config(config.cells.as_deref())?;
    let reports = hardy::sweep(&sweep_config, parallelism)?;

    let mut strips = BTreeMap::new();
    for cell in &cells {
        strips.insert(cell.label.clone(), cell.strip()?);
    }
    let summary = report::summarize(&reports, &strips);

    std::fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
    let csv_path = out.join("reports.csv");
    let json_path = out.join("summary.json");
    std::fs::write(&csv_path, report::to_csv(&reports))
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", csv_path.display())))?;
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("summary serialization failed: {e}")))?;
    std::fs::write(&json_path, json)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", json_path.display())))?;

    let mut hard_failures = 0usize;
    let mut negatives = 0usize;
    for r in &reports {
        if r.error.is_some() {
            hard_failures += 1;
        } else if r.flags.divergent {
            if r.flags.expected_negative {
                negatives += 1;
            } else {
                hard_failures += 1;
            }
        } else if r.flags.in_strip && !r.flags.split_consistent {
            hard_failures += 1;
        }
    }
    println!(
        "{} reports ({} expected-negative probes, {} hard failures) -> {}",
        reports.len(),
        negatives,
        hard_failures,
        out.display()
    );
    Ok(if hard_failures > 0 {
        ExitCode::from(2)
    } else if negatives > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_kernel_table(
    d: usize,
    k: &[f64],
    min: f64,
    max: f64,
    steps: usize,
    out: &PathBuf,
) -> Result<ExitCode> {
    if steps < 2 {
        return Err(Error::Config("need at least 2 grid steps".into()));
    }
    let sys = RootSystemData::build(Preset::Z2Product, d)?;
    let weight = WeightContext::new(sys, MultiplicityFunction::new(k.to_vec())?)?;
    let kernel = KernelContext::new(weight)?;
    let mut csv = String::from("x,y,re,im,modulus\n");
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    for i in 0..steps {
        let t = min + (max - min) * i as f64 / (steps - 1) as f64;
        for j in 0..steps {
            let s = min + (max - min) * j as f64 / (steps - 1) as f64;
            x[0] = t;
            y[0] = s;
            let v = kernel.eval(&x, &y);
            csv.push_str(&format!(
                "{t:.17e},{s:.17e},{:.17e},{:.17e},{:.17e}\n",
                v.re,
                v.im,
                v.norm()
            ));
        }
    }
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Config(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(out, csv)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", out.display())))?;
    println!("kernel table ({steps}x{steps}) -> {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_atom_make(config: &ConfigArgs, out: &PathBuf) -> Result<ExitCode> {
    let (cfg, cells) = load(config)?;
    std::fs::create_dir_all(out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
    let mut count = 0usize;
    for cell in &cells {
        let ctx: MeasureContext = cell.measure_context()?;
        let mut corpus = Vec::new();
        for &seed in &cfg.seeds {
            for &j in &cfg.radii_exponents {
                let spec = atoms::AtomSpec::new(&ctx, cell.p, 2f64.powi(j), seed)?;
                let atom = atoms::construct(&ctx, &spec)?;
                corpus.push(atom);
                count += 1;
            }
        }
        let path = out.join(format!("atoms-{}.json", cell.label));
        let json = serde_json::to_string_pretty(&corpus)
            .map_err(|e| Error::Config(format!("atom serialization failed: {e}")))?;
        std::fs::write(&path, json)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    println!("{count} atoms -> {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn hash_label(label: &str) -> u64 {
    // tiny FNV-1a so each cell draws an independent RNG stream
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
