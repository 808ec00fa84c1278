use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use sjc_core::report::{run_suite, Suite, SuiteConfig, Surface};
use sjc_core::ModelDescriptor;

/// Verification suites for super J-holomorphic curves.
#[derive(Debug, Parser)]
#[command(name = "sjc", version)]
struct Cli {
    /// flat, identities, index, bochner, moduli, linearize, verify-flat or verify-components
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    /// JSON config; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Grassmann generators
    #[arg(long)]
    generators: Option<usize>,
    /// Model descriptor as JSON, e.g. '{"kind":"flat","n":1}'
    #[arg(long)]
    model: Option<String>,
    /// Directory for report.json and CSV files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Input file for the verify suites
    #[arg(long)]
    input: Option<PathBuf>,

    /// sphere or torus
    #[arg(long, value_parser = parse_surface)]
    surface: Option<Surface>,
    /// Line bundle degree k, or curve degree for CPⁿ targets
    #[arg(long, allow_hyphen_values = true)]
    degree: Option<i64>,
    /// Sphere level or torus Fourier cutoff
    #[arg(long)]
    cutoff: Option<usize>,
    /// Complex dimension of the target for index runs
    #[arg(long)]
    target_rank: Option<usize>,
    /// Relative singular value threshold
    #[arg(long)]
    threshold: Option<f64>,

    /// Complex dimension of the target
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    genus: Option<u32>,
    /// ⟨c₁(TN), A⟩
    #[arg(long, allow_hyphen_values = true)]
    c1a: Option<i64>,
    /// Dimension of the gravitino space
    #[arg(long)]
    dimx: Option<u32>,

    /// Holomorphic sectional curvature of the target
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Lower bound of ‖dφ‖²
    #[arg(long)]
    energy_min: Option<f64>,
    /// Upper bound of ‖dφ‖²
    #[arg(long)]
    energy_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    scalar_curvature: Option<f64>,

    /// Grid points per side
    #[arg(long)]
    resolution: Option<usize>,
    /// Finite-difference step
    #[arg(long)]
    step: Option<f64>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: sjc_core::Error| e.to_string())
}

fn parse_surface(s: &str) -> Result<Surface, String> {
    s.parse().map_err(|e: sjc_core::Error| e.to_string())
}

fn config(cli: &Cli) -> Result<SuiteConfig> {
    let mut c = match &cli.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            SuiteConfig::from_json(&text)?
        }
        None => SuiteConfig::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = cli.$f.clone() { c.$f = v; } )* };
    }
    macro_rules! set_opt {
        ($($f:ident),*) => { $( if cli.$f.is_some() { c.$f = cli.$f.clone(); } )* };
    }
    set!(
        seed,
        surface,
        degree,
        target_rank,
        threshold,
        n,
        genus,
        c1a,
        dimx,
        sigma,
        energy_min,
        energy_max,
        resolution,
        step
    );
    set_opt!(trials, generators, cutoff, input, scalar_curvature);
    if let Some(m) = &cli.model {
        let d: ModelDescriptor = serde_json::from_str(m).context("parsing --model")?;
        c.model = Some(d);
    }
    Ok(c)
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = config(cli)?;
    let out = run_suite(cli.suite, &cfg)?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let write = |name: &str, text: &str| -> Result<()> {
        let p = cli.out.join(name);
        std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
    };
    write("report.json", &(out.report.to_json() + "\n"))?;
    if let Some(csv) = &out.singular_values_csv {
        write("singular_values.csv", csv)?;
    }
    if let Some(csv) = &out.residual_field_csv {
        write("residual_field.csv", csv)?;
    }
    for c in &out.report.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status} {} value={:e} tol={:e}", c.name, c.value, c.tol);
    }
    for (k, v) in &out.report.facts {
        println!("{k}: {v}");
    }
    Ok(out.report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
