//! `hesslab` command-line front end.
//!
//! Subcommands:
//!   solution    sample an explicit radial solution to CSV
//!   verify      check the integral identities over a parameter matrix
//!   properties  run the seeded symmetric-function property suites
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage/parameter error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hesslab::{
    fmt_human, parameter_matrix, report_csv_row, report_text_row, run_property_suites,
    write_solution_csv, REPORT_HEADER,
};
use hesslab_core::geometry::SpaceForm;
use hesslab_core::pohozaev::{negative_control, verify_identity, IdentityId, QuadratureGrid};
use hesslab_core::radial::{explicit_solution, ProblemParams};
use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "hesslab",
    version,
    about = "Numerical laboratory for radial Hessian-quotient equations in space forms"
)]
struct Cli {
    /// Plain key=value file supplying flag defaults; explicit flags override.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an explicit radial solution on a grid and emit CSV
    Solution(SolutionArgs),
    /// Verify the Rellich-Pohozaev integral identities
    Verify(VerifyArgs),
    /// Run the randomized symmetric-function property suites
    Properties(PropertiesArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Args)]
struct SolutionArgs {
    /// Dimension n >= 2
    #[arg(long)]
    n: Option<usize>,
    /// Hessian order k
    #[arg(long)]
    k: Option<usize>,
    /// Quotient order l (0 for the pure k-Hessian)
    #[arg(long)]
    l: Option<usize>,
    /// Sectional curvature
    #[arg(long = "K", allow_hyphen_values = true)]
    curvature: Option<f64>,
    /// Boundary datum c1 (u = Kc1 on the boundary)
    #[arg(long, allow_hyphen_values = true)]
    c1: Option<f64>,
    /// Boundary datum c2 > 0 (u_nu = c2 on the boundary)
    #[arg(long)]
    c2: Option<f64>,
    /// Number of sample radii (both endpoints included)
    #[arg(long)]
    samples: Option<usize>,
    /// Output file (stdout when absent)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Dimension n (absent: run the standard matrix)
    #[arg(long)]
    n: Option<usize>,
    /// Hessian order k
    #[arg(long)]
    k: Option<usize>,
    /// Sectional curvature
    #[arg(long = "K", allow_hyphen_values = true)]
    curvature: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// Quadrature panels before refinement
    #[arg(long)]
    panels: Option<usize>,
    /// Perturbation size: run the expected-failure negative-control mode
    #[arg(long)]
    negative_control: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PropertiesArgs {
    /// Random trials per suite
    #[arg(long)]
    trials: Option<usize>,
    /// RNG seed (default 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Largest matrix/spectrum dimension (clamped to [2, 8])
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// A parameter error: message to stderr, exit 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = match cli.config.as_deref().map(read_config).transpose() {
        Ok(map) => map.unwrap_or_default(),
        Err(e) => {
            eprintln!("hesslab: config: {}", e.0);
            return ExitCode::from(2);
        }
    };
    let run = match cli.command {
        Command::Solution(args) => cmd_solution(args, &defaults),
        Command::Verify(args) => cmd_verify(args, &defaults),
        Command::Properties(args) => cmd_properties(args, &defaults),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hesslab: {}", e.0);
            ExitCode::from(2)
        }
    }
}

fn read_config(path: &std::path::Path) -> Result<HashMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UsageError(format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag value, else config-file value, else built-in default.
fn setting<T: FromStr + Copy>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, UsageError>
where
    T::Err: std::fmt::Display,
{
    optional(flag, cfg, key)?.map_or(Ok(default), Ok)
}

fn optional<T: FromStr + Copy>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, UsageError>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    cfg.get(key)
        .map(|v| {
            v.parse()
                .map_err(|e| UsageError(format!("config {key}={v}: {e}")))
        })
        .transpose()
}

fn required<T: FromStr + Copy>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
) -> Result<T, UsageError>
where
    T::Err: std::fmt::Display,
{
    optional(flag, cfg, key)?.ok_or_else(|| UsageError(format!("missing required --{key}")))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, UsageError> {
    match path {
        Some(p) => Ok(Box::new(std::fs::File::create(p)?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn cmd_solution(args: SolutionArgs, cfg: &HashMap<String, String>) -> Result<u8, UsageError> {
    let n = required(args.n, cfg, "n")?;
    let k = required(args.k, cfg, "k")?;
    let l = setting(args.l, cfg, "l", 0)?;
    let curvature = required(args.curvature, cfg, "K")?;
    let c1 = setting(args.c1, cfg, "c1", 0.0)?;
    let c2 = required(args.c2, cfg, "c2")?;
    let samples = setting(args.samples, cfg, "samples", 200)?;
    let sf = SpaceForm::new(n, curvature)?;
    let params = ProblemParams::new(sf, k, l, c1, c2)?;
    let sol = explicit_solution(params)?;
    let mut out = open_output(&args.output)?;
    write_solution_csv(&mut out, &sol, samples)?;
    Ok(0)
}

const VERIFY_TOL: f64 = 1e-8;

fn cmd_verify(args: VerifyArgs, cfg: &HashMap<String, String>) -> Result<u8, UsageError> {
    let panels = setting(args.panels, cfg, "panels", 64)?;
    let format = args.format.unwrap_or(Format::Text);
    let eps = optional(args.negative_control, cfg, "negative_control")?;
    let grid = QuadratureGrid::with_panels(panels);

    let single = args.n.is_some()
        || args.k.is_some()
        || args.curvature.is_some()
        || args.c1.is_some()
        || args.c2.is_some();
    let cases: Vec<ProblemParams> = if single {
        let n = required(args.n, cfg, "n")?;
        let k = required(args.k, cfg, "k")?;
        let curvature = required(args.curvature, cfg, "K")?;
        let c1 = setting(args.c1, cfg, "c1", 0.0)?;
        let c2 = required(args.c2, cfg, "c2")?;
        vec![ProblemParams::new(
            SpaceForm::new(n, curvature)?,
            k,
            0,
            c1,
            c2,
        )?]
    } else {
        parameter_matrix(false)
    };

    let mut out = open_output(&args.output)?;
    if format == Format::Csv {
        writeln!(out, "{REPORT_HEADER}")?;
    }
    let mut failures = 0usize;
    for params in &cases {
        let sol = explicit_solution(*params)?;
        match eps {
            None => {
                for id in IdentityId::ALL_INTEGRAL {
                    let rep = verify_identity(&sol, id, &grid)?;
                    let pass = rep.rel_residual < VERIFY_TOL && rep.converged;
                    if !pass {
                        failures += 1;
                    }
                    match format {
                        Format::Csv => writeln!(out, "{}", report_csv_row(params, &rep))?,
                        Format::Text => writeln!(
                            out,
                            "{}  {}",
                            if pass { "PASS" } else { "FAIL" },
                            report_text_row(params, &rep)
                        )?,
                    }
                }
            }
            Some(eps) => {
                // expected-failure mode: the identity must notice the
                // perturbation; success is a residual blow-up
                let base = verify_identity(&sol, IdentityId::L6_3, &grid)?;
                let pert = negative_control(&sol, eps, IdentityId::L6_3, &grid)?;
                let blew_up = pert.rel_residual > 100.0 * base.rel_residual.max(1e-14);
                if !blew_up {
                    failures += 1;
                }
                match format {
                    Format::Csv => {
                        writeln!(out, "{}", report_csv_row(params, &base))?;
                        writeln!(out, "{}", report_csv_row(params, &pert))?;
                    }
                    Format::Text => writeln!(
                        out,
                        "{}  negative control eps={}: residual {} -> {}  {}",
                        if blew_up { "PASS" } else { "FAIL" },
                        fmt_human(eps),
                        fmt_human(base.rel_residual),
                        fmt_human(pert.rel_residual),
                        report_text_row(params, &pert)
                    )?,
                }
            }
        }
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_properties(args: PropertiesArgs, cfg: &HashMap<String, String>) -> Result<u8, UsageError> {
    let trials = setting(args.trials, cfg, "trials", 1000)?;
    let seed = setting(args.seed, cfg, "seed", 42)?;
    let nmax = setting(args.nmax, cfg, "nmax", 8)?;
    let mut out = open_output(&args.output)?;
    if trials == 0 {
        writeln!(out, "WARNING: trials=0, all suites pass vacuously")?;
    }
    let results = run_property_suites(trials, seed, nmax);
    let mut failures = 0usize;
    for r in &results {
        if !r.pass {
            failures += 1;
        }
        writeln!(out, "{}", r.text_row())?;
    }
    writeln!(
        out,
        "{}/{} suites passed (trials={trials}, seed={seed}, nmax={nmax})",
        results.len() - failures,
        results.len()
    )?;
    Ok(if failures == 0 { 0 } else { 1 })
}
