//! Batch driver for the twist-family pipelines.
//!
//! Four subcommands cover the four verification surfaces: `density` runs
//! the explicit-formula evaluation and writes the term breakdown plus an
//! X-sweep, `ratios` runs the recipe prediction and the side-by-side
//! comparison, `charsum` scans the restricted character-square grid, and
//! `census` tabulates family counts against the asymptotic.  A JSON config
//! file seeds every knob; command-line flags override config keys; every
//! JSON artifact embeds the version and a hash of the effective config so
//! runs can be audited and reproduced byte for byte.

use anyhow::Context;
use clap::{Parser, Subcommand};
use quadtwist::arith::{Family, Selector};
use quadtwist::charsum::{fitted_x_exponents, jutila_grid, ResidueSide};
use quadtwist::curve::Curve;
use quadtwist::density::{self, census_main_term, DensityConfig, DensityRun};
use quadtwist::ratios;
use quadtwist::special::{
    conductor_series_grid, dirichlet_coefficient_sum, sym2_log_deriv_grid, zeta_log_deriv_grid,
};
use quadtwist::testfn::TestFunction;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "quadtwist",
    version,
    about = "Desk-scale checks for the quadratic twist family of the conductor-11 curve"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON config file; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Discriminant cutoffs, comma separated
    #[arg(long = "X", global = true, value_delimiter = ',')]
    x: Option<Vec<u64>>,

    /// Support half-width of the test function, in (0, 1)
    #[arg(long, global = true)]
    sigma: Option<f64>,

    /// Weierstrass coefficients a1,a2,a3,a4,a6
    #[arg(long, global = true, value_delimiter = ',', num_args = 5)]
    curve: Option<Vec<i64>>,

    /// Conductor of the curve
    #[arg(long, global = true)]
    conductor: Option<u64>,

    /// Root number, +1 or -1
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega: Option<i32>,

    /// Euler-product truncation for the ratios factors and diagnostics
    #[arg(long, global = true)]
    prime_limit: Option<u64>,

    /// Prime-power depth for the diagnostic identity
    #[arg(long, global = true)]
    power_limit: Option<u32>,

    /// Extrapolated-tail target for the quadratures
    #[arg(long, global = true)]
    tail_eps: Option<f64>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores); results are identical either way
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Test-function family: fejer or cosine
    #[arg(long, global = true)]
    test_function: Option<String>,

    /// Also write the family members as family.csv
    #[arg(long, global = true)]
    export_family: bool,

    /// Also write the eigenvalue table as hecke.csv
    #[arg(long, global = true)]
    export_hecke: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Explicit-formula evaluation: term breakdown and X-sweep
    Density,
    /// Recipe prediction and the side-by-side comparison
    Ratios,
    /// Restricted character-square grid scan
    Charsum {
        /// Inner cutoffs N, comma separated
        #[arg(long = "N", value_delimiter = ',')]
        n: Option<Vec<u64>>,
        /// Restriction moduli, comma separated
        #[arg(long = "M", value_delimiter = ',')]
        m: Option<Vec<u64>>,
        /// Which residue class of d survives: square or nonsquare
        #[arg(long)]
        side: Option<String>,
    },
    /// Family counts against the density asymptotic
    Census {
        /// Moduli to census, comma separated
        #[arg(long = "M", value_delimiter = ',')]
        m: Option<Vec<u64>>,
    },
}

/// Effective settings for one invocation, after merging defaults, the
/// config file, and flags.  Serialized verbatim into the config hash.
#[derive(Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    curve: [i64; 5],
    conductor: u64,
    omega: i32,
    x: Option<Vec<u64>>,
    sigma: f64,
    test_function: String,
    prime_limit: u64,
    power_limit: u32,
    tail_eps: f64,
    out: PathBuf,
    jobs: usize,
    n_grid: Vec<u64>,
    m_grid: Option<Vec<u64>>,
    side: String,
    export_family: bool,
    export_hecke: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            curve: [0, -1, 1, -10, -20],
            conductor: 11,
            omega: 1,
            x: None,
            sigma: 0.5,
            test_function: "fejer".into(),
            prime_limit: 10_000,
            power_limit: 30,
            tail_eps: 1e-6,
            out: PathBuf::from("."),
            jobs: 0,
            n_grid: vec![100, 1_000],
            m_grid: None,
            side: "square".into(),
            export_family: false,
            export_hecke: false,
        }
    }
}

/// Invalid input: exit code 2.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid input: {}", self.0)
    }
}

impl std::error::Error for Invalid {}

/// A verification claim failed on valid input: exit code 1.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for Failed {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Invalid(msg.into()))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("quadtwist: {e:#}");
            if e.chain().any(|c| c.is::<Failed>()) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let cfg = merge_config(&cli)?;
    validate(&cfg)?;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .ok();
    }
    match &cli.command {
        Cmd::Density => cmd_density(&cfg),
        Cmd::Ratios => cmd_ratios(&cfg),
        Cmd::Charsum { .. } => cmd_charsum(&cfg),
        Cmd::Census { .. } => cmd_census(&cfg),
    }
}

fn merge_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))
                .map_err(|e| invalid(format!("{e:#}")))?;
            serde_json::from_str(&text).map_err(|e| invalid(format!("config parse: {e}")))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = &cli.x {
        cfg.x = Some(v.clone());
    }
    if let Some(v) = cli.sigma {
        cfg.sigma = v;
    }
    if let Some(v) = &cli.curve {
        cfg.curve = [v[0], v[1], v[2], v[3], v[4]];
    }
    if let Some(v) = cli.conductor {
        cfg.conductor = v;
    }
    if let Some(v) = cli.omega {
        cfg.omega = v;
    }
    if let Some(v) = cli.prime_limit {
        cfg.prime_limit = v;
    }
    if let Some(v) = cli.power_limit {
        cfg.power_limit = v;
    }
    if let Some(v) = cli.tail_eps {
        cfg.tail_eps = v;
    }
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    if let Some(v) = cli.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = &cli.test_function {
        cfg.test_function = v.clone();
    }
    if cli.export_family {
        cfg.export_family = true;
    }
    if cli.export_hecke {
        cfg.export_hecke = true;
    }
    match &cli.command {
        Cmd::Charsum { n, m, side } => {
            if let Some(v) = n {
                cfg.n_grid = v.clone();
            }
            if let Some(v) = m {
                cfg.m_grid = Some(v.clone());
            }
            if let Some(v) = side {
                cfg.side = v.clone();
            }
        }
        Cmd::Census { m } => {
            if let Some(v) = m {
                cfg.m_grid = Some(v.clone());
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> anyhow::Result<()> {
    if !(cfg.sigma > 0.0 && cfg.sigma < 1.0) {
        return Err(invalid(format!("sigma {} must lie in (0, 1)", cfg.sigma)));
    }
    if let Some(xs) = &cfg.x {
        if xs.is_empty() || xs.iter().any(|&x| x < 10) {
            return Err(invalid("every X must be at least 10"));
        }
    }
    if cfg.prime_limit < 2 {
        return Err(invalid("prime_limit must be at least 2"));
    }
    if cfg.power_limit == 0 {
        return Err(invalid("power_limit must be positive"));
    }
    if !(cfg.tail_eps > 0.0) {
        return Err(invalid("tail_eps must be positive"));
    }
    match cfg.test_function.as_str() {
        "fejer" | "cosine" => {}
        other => return Err(invalid(format!("unknown test function {other:?}"))),
    }
    match cfg.side.as_str() {
        "square" | "nonsquare" => {}
        other => return Err(invalid(format!("unknown residue side {other:?}"))),
    }
    if cfg.n_grid.is_empty() || cfg.n_grid.iter().any(|&n| n == 0) {
        return Err(invalid("N grid must be nonempty and positive"));
    }
    Ok(())
}

fn curve_of(cfg: &RunConfig) -> anyhow::Result<Curve> {
    Curve::new(cfg.curve, cfg.conductor, cfg.omega)
        .map_err(|e| invalid(format!("curve rejected: {e}")))
}

fn test_function_of(cfg: &RunConfig) -> anyhow::Result<TestFunction> {
    let tf = match cfg.test_function.as_str() {
        "fejer" => TestFunction::fejer(cfg.sigma),
        _ => TestFunction::cosine(cfg.sigma),
    };
    tf.map_err(|e| invalid(format!("test function rejected: {e}")))
}

fn side_of(cfg: &RunConfig) -> ResidueSide {
    if cfg.side == "square" {
        ResidueSide::Square
    } else {
        ResidueSide::NonSquare
    }
}

/// Hash of the effective config with the output directory blanked, so runs
/// into different directories still produce identical artifacts.
fn config_hash(cfg: &RunConfig) -> String {
    let mut portable = cfg.clone();
    portable.out = PathBuf::new();
    let canon = serde_json::to_string(&portable).expect("config serializes");
    let mut h = Sha256::new();
    h.update(canon.as_bytes());
    let digest = h.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        write!(hex, "{b:02x}").expect("hex digits");
    }
    hex
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    version: &'static str,
    config_sha256: String,
    #[serde(flatten)]
    body: T,
}

fn write_json<T: Serialize>(cfg: &RunConfig, name: &str, body: T) -> anyhow::Result<()> {
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: config_hash(cfg),
        body,
    };
    let text = serde_json::to_string_pretty(&report)?;
    write_text(cfg, name, &(text + "\n"))
}

fn write_text(cfg: &RunConfig, name: &str, contents: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(&cfg.out)
        .with_context(|| format!("creating {}", cfg.out.display()))?;
    let path: &Path = &cfg.out.join(name);
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn density_run_at(cfg: &RunConfig, x: u64) -> anyhow::Result<DensityRun> {
    let mut dcfg = DensityConfig::new(curve_of(cfg)?, x, test_function_of(cfg)?);
    dcfg.tail_eps = cfg.tail_eps;
    density::run(dcfg).map_err(anyhow::Error::new)
}

#[derive(Serialize)]
struct DensityReport {
    x: u64,
    sigma: f64,
    family_size: u64,
    scaling_log: f64,
    /// Residual of the prime-power identity at s = 2 under the configured
    /// truncations; a cheap self-check that the eigenvalue table is sane.
    identity_residual: f64,
    breakdown: quadtwist::density::DensityBreakdown,
}

fn cmd_density(cfg: &RunConfig) -> anyhow::Result<()> {
    let xs = cfg.x.clone().unwrap_or_else(|| vec![10_000]);
    let mut sweep = String::from(
        "x,family_size,gamma_term,conductor_even,good_prime_even,divisor_even,conductor_odd,\
         good_prime_odd_remainder,total_closed,total_direct,envelope,discrepancy\n",
    );
    let mut last: Option<DensityRun> = None;
    for &x in &xs {
        let run = density_run_at(cfg, x)?;
        let b = &run.breakdown;
        let disc = (b.total_direct - b.total_closed).abs();
        writeln!(
            sweep,
            "{x},{},{},{},{},{},{},{},{},{},{},{}",
            run.family.size(),
            b.gamma_term,
            b.conductor_even,
            b.good_prime_even,
            b.divisor_even,
            b.conductor_odd,
            b.good_prime_odd_remainder,
            b.total_closed,
            b.total_direct,
            b.envelope,
            disc
        )?;
        println!(
            "X = {x}: X* = {}, closed = {:.6}, direct = {:.6}, |gap| = {:.3e} (envelope {:.3e})",
            run.family.size(),
            b.total_closed,
            b.total_direct,
            disc,
            b.envelope
        );
        last = Some(run);
    }
    let run = last.expect("at least one cutoff");
    let residual = identity_residual(&run, cfg)?;
    write_text(cfg, "density_sweep.csv", &sweep)?;
    write_json(
        cfg,
        "density_breakdown.json",
        DensityReport {
            x: run.config.x,
            sigma: cfg.sigma,
            family_size: run.family.size(),
            scaling_log: run.scaling_log,
            identity_residual: residual,
            breakdown: run.breakdown,
        },
    )?;
    if cfg.export_family {
        let mut csv = String::from("d,twist_log\n");
        for (d, t) in run.family.members.iter().zip(&run.twist_logs) {
            writeln!(csv, "{d},{t}")?;
        }
        write_text(cfg, "family.csv", &csv)?;
    }
    if cfg.export_hecke {
        let mut csv = String::from("p,a_p,lambda\n");
        for (i, &p) in run.hecke.primes.iter().enumerate() {
            if p == run.config.curve.conductor {
                writeln!(csv, "{p},,")?;
            } else {
                writeln!(csv, "{p},{},{}", run.hecke.ap[i], run.hecke.lambda[i])?;
            }
        }
        write_text(cfg, "hecke.csv", &csv)?;
    }
    Ok(())
}

fn identity_residual(run: &DensityRun, cfg: &RunConfig) -> anyhow::Result<f64> {
    let table = &run.hecke;
    let p_max = cfg.prime_limit.min(table.built_to);
    let k_max = cfg.power_limit;
    let cap = u64::MAX / 2;
    let s = 2.0;
    let lhs = dirichlet_coefficient_sum(table, s, p_max, k_max, cap)?;
    let rhs = zeta_log_deriv_grid(table, s, p_max, k_max, cap)?
        - sym2_log_deriv_grid(table, s, p_max, k_max, cap)?
        + conductor_series_grid(run.config.curve.conductor, s + 1.0, k_max, cap);
    Ok(lhs - rhs)
}

#[derive(Serialize)]
struct RatiosReport {
    x: u64,
    sigma: f64,
    prime_limit: u64,
    breakdown: quadtwist::ratios::RatiosBreakdown,
}

fn cmd_ratios(cfg: &RunConfig) -> anyhow::Result<()> {
    let xs = cfg.x.clone().unwrap_or_else(|| vec![10_000]);
    let x = *xs.last().expect("validated nonempty");
    let run = density_run_at(cfg, x)?;
    let pred = ratios::predict_with_cap(&run, cfg.prime_limit)?;
    let mut csv = String::from("term,nt_value,ratios_value,difference\n");
    for row in ratios::comparison_rows(&run, &pred) {
        writeln!(
            csv,
            "{},{},{},{}",
            row.term, row.number_theory, row.ratios, row.difference
        )?;
    }
    write_text(cfg, "nt_vs_ratios.csv", &csv)?;
    write_json(
        cfg,
        "ratios_breakdown.json",
        RatiosReport {
            x,
            sigma: cfg.sigma,
            prime_limit: cfg.prime_limit,
            breakdown: pred.clone(),
        },
    )?;
    println!(
        "X = {x}: oscillatory = {:.6} vs g(0)/2 = {:.6}; totals {:.6} (recipe) vs {:.6} (direct)",
        pred.ae_oscillatory, run.g0_half, pred.total, run.breakdown.total_direct
    );
    let gap = (pred.total - run.breakdown.total_direct).abs();
    let allowance = pred.oscillatory_error.abs() + run.breakdown.envelope;
    if gap > allowance {
        return Err(anyhow::Error::new(Failed(format!(
            "prediction gap {gap:.3e} exceeds oscillatory error + envelope {allowance:.3e}"
        ))));
    }
    Ok(())
}

fn cmd_charsum(cfg: &RunConfig) -> anyhow::Result<()> {
    let xs = cfg.x.clone().unwrap_or_else(|| vec![1_000, 10_000]);
    let ms = cfg.m_grid.clone().unwrap_or_else(|| vec![3, 11, 15]);
    let side = side_of(cfg);
    let cells = jutila_grid(&cfg.n_grid, &ms, &xs, side).map_err(|e| invalid(e.to_string()))?;
    let fits = fitted_x_exponents(&cells);
    let mut csv = String::from("N,M,X,S,S1,S2,ratio,fitted_exponent\n");
    for c in &cells {
        let fit = fits
            .iter()
            .find(|f| f.n_limit == c.n_limit && f.modulus == c.modulus && f.side == c.side)
            .map(|f| f.exponent.to_string())
            .unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{fit}",
            c.n_limit, c.modulus, c.x, c.s, c.s1, c.s2, c.ratio
        )?;
        if 2 * c.s > c.s1 + c.s2 {
            return Err(anyhow::Error::new(Failed(format!(
                "split bound violated at N={} M={} X={}",
                c.n_limit, c.modulus, c.x
            ))));
        }
    }
    write_text(cfg, "charsum_grid.csv", &csv)?;
    println!(
        "{} cells written; fitted X-exponents: {}",
        cells.len(),
        fits.iter()
            .map(|f| format!("{:.3}", f.exponent))
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}

fn cmd_census(cfg: &RunConfig) -> anyhow::Result<()> {
    let xs = cfg
        .x
        .clone()
        .unwrap_or_else(|| vec![10_000, 100_000, 1_000_000]);
    let ms = cfg.m_grid.clone().unwrap_or_else(|| vec![cfg.conductor]);
    let mut csv = String::from("m,x,family_size,main_term,error,normalized_error\n");
    for &m in &ms {
        for &x in &xs {
            let fam = Family::build(x, m, 1, Selector::ResidueSquare, false)
                .map_err(|e| invalid(e.to_string()))?;
            let size = fam.size();
            let main = census_main_term(x, m);
            let err = size as f64 - main;
            let norm = err / (x as f64).sqrt();
            writeln!(csv, "{m},{x},{size},{main},{err},{norm}")?;
            println!("M = {m}, X = {x}: X* = {size}, main = {main:.1}, error/sqrt(X) = {norm:.3}");
        }
    }
    write_text(cfg, "census.csv", &csv)?;
    Ok(())
}
