//! `covbound` — tail bounds for Wishart scatter matrices from the command
//! line: closed-form bound evaluation, sample-size planning, Monte Carlo
//! auditing, and the symbolic moment oracle.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 a certified mathematical
//! check failed (a Monte Carlo verdict of VIOLATED or a failed oracle
//! certificate — either indicates an implementation bug, not bad input).

mod oracle;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use covbound::bounds::{
    bound_eq15, bound_eq16, bound_eq17, bound_eq18, bound_eq19, bound_eq20, budget_multiplicity,
    solve_n_for, theta_for_confidence, Equation, TailBound,
};
use covbound::io::{load_source, parse_spectrum_list, InputSource};
use covbound::montecarlo::{exceedance, reports_to_csv, TrialConfig, Verdict};
use covbound::spectra::Spectrum;
use covbound::Error;

use render::{fmt_sig9, Format};

/// Default θ grid for `verify`, straddling vacuous and informative budgets
/// for small dimensions.
const DEFAULT_THETA_GRID: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 5.0];

#[derive(Parser)]
#[command(
    name = "covbound",
    version,
    about = "Tail bounds for Wishart scatter matrices: evaluate, invert, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form tail bounds for a covariance input
    Bound(BoundArgs),
    /// Minimal sample size n reaching a target relative deviation
    Plan(PlanArgs),
    /// Monte Carlo audit: empirical exceedance rates vs probability budgets
    Verify(VerifyArgs),
    /// Moment-oracle self-checks and PSD dominance certificates
    Oracle(OracleArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Covariance input file: CSV rows, matrix JSON, or spectrum JSON
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// Inline eigenvalue list, e.g. --spectrum 4,2,1
    #[arg(long, value_name = "LIST")]
    spectrum: Option<String>,
}

impl InputArgs {
    fn resolve(&self) -> Result<InputSource, Error> {
        match (&self.matrix, &self.spectrum) {
            (Some(path), None) => load_source(path),
            (None, Some(list)) => Ok(InputSource::Spectrum(parse_spectrum_list(list)?)),
            _ => unreachable!("clap enforces exactly one input source"),
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ThetaOrDelta {
    /// Exponent θ ≥ 0
    #[arg(long)]
    theta: Option<f64>,
    /// Failure probability δ in (0,1); θ = ln(multiplicity/δ) per equation
    #[arg(long)]
    delta: Option<f64>,
}

impl ThetaOrDelta {
    /// θ for one equation, inverting the budget when δ was given.
    fn theta_for(&self, equation: Equation, d: usize, ell: usize) -> Result<f64, Error> {
        match (self.theta, self.delta) {
            (Some(theta), None) => Ok(theta),
            (None, Some(delta)) => {
                theta_for_confidence(delta, budget_multiplicity(equation, d, ell))
            }
            _ => unreachable!("clap enforces exactly one of theta/delta"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EquationArg {
    Eq15,
    Eq16,
    Eq17,
    Eq18,
    Eq19,
    Eq20,
}

impl From<EquationArg> for Equation {
    fn from(e: EquationArg) -> Equation {
        match e {
            EquationArg::Eq15 => Equation::Eq15,
            EquationArg::Eq16 => Equation::Eq16,
            EquationArg::Eq17 => Equation::Eq17,
            EquationArg::Eq18 => Equation::Eq18,
            EquationArg::Eq19 => Equation::Eq19,
            EquationArg::Eq20 => Equation::Eq20,
        }
    }
}

fn equations_or_all(list: &Option<Vec<EquationArg>>) -> Vec<Equation> {
    match list {
        Some(picked) => picked.iter().copied().map(Equation::from).collect(),
        None => Equation::ALL.to_vec(),
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    exponent: ThetaOrDelta,
    /// Number of samples n behind S/n
    #[arg(long)]
    n: u64,
    /// Eigenvalue index for eq18–eq20 (default: all defined indices)
    #[arg(long)]
    ell: Option<usize>,
    /// Subset of bounds to print, e.g. --equations eq15,eq17
    #[arg(long, value_delimiter = ',')]
    equations: Option<Vec<EquationArg>>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    exponent: ThetaOrDelta,
    /// Target relative deviation ε
    #[arg(long = "eps-rel")]
    eps_rel: f64,
    /// Eigenvalue index for eq18–eq20 (default: all defined indices)
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    equations: Option<Vec<EquationArg>>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Samples per scatter matrix
    #[arg(long)]
    n: u64,
    /// Independent scatter matrices to draw
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// RNG seed; identical configs reproduce byte-identical output
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Single θ instead of the default grid 0.5,1,2,3,5
    #[arg(long)]
    theta: Option<f64>,
    /// Restrict the report to a subset of equations
    #[arg(long, value_delimiter = ',')]
    equations: Option<Vec<EquationArg>>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    /// Covariance matrix file (d ≤ 3); default is a seeded random PSD matrix
    #[arg(long, value_name = "PATH", conflicts_with_all = ["dim", "seed"])]
    matrix: Option<PathBuf>,
    /// Dimension of the generated test matrix
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Seed for the generated test matrix
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Moment-order range, e.g. --p 2..5 or --p 4
    #[arg(long, default_value = "2..5")]
    p: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("COVBOUND_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
    {
        // Errors only mean the pool was already initialized.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let outcome = match cli.command {
        Command::Bound(args) => cmd_bound(&args),
        Command::Plan(args) => cmd_plan(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Oracle(args) => oracle::cmd_oracle(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("covbound: {err}");
            ExitCode::from(2)
        }
    }
}

/// Every bound row the given ℓ selection produces for one equation.
fn ells_for(equation: Equation, sp: &Spectrum, ell: Option<usize>) -> Vec<usize> {
    match equation {
        Equation::Eq15 | Equation::Eq16 | Equation::Eq17 => vec![1],
        _ => match ell {
            Some(l) => vec![l],
            // All indices where the bound is defined.
            None => (1..=sp.dim())
                .filter(|&l| sp.kappa(l).is_finite())
                .collect(),
        },
    }
}

fn evaluate_bound(
    sp: &Spectrum,
    equation: Equation,
    n: u64,
    theta: f64,
    ell: usize,
) -> Result<TailBound, Error> {
    match equation {
        Equation::Eq15 => bound_eq15(sp, n, theta),
        Equation::Eq16 => bound_eq16(sp, n, theta),
        Equation::Eq17 => bound_eq17(sp, n, theta),
        Equation::Eq18 => bound_eq18(sp, n, theta, ell),
        Equation::Eq19 => bound_eq19(sp, n, theta, ell),
        Equation::Eq20 => bound_eq20(sp, n, theta, ell),
    }
}

fn cmd_bound(args: &BoundArgs) -> Result<ExitCode, Error> {
    let sp = args.input.resolve()?.spectrum()?;
    let d = sp.dim();
    let mut rows: Vec<TailBound> = Vec::new();
    for equation in equations_or_all(&args.equations) {
        for ell in ells_for(equation, &sp, args.ell) {
            let theta = args.exponent.theta_for(equation, d, ell)?;
            rows.push(evaluate_bound(&sp, equation, args.n, theta, ell)?);
        }
    }

    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&rows).expect("serialize")
        ),
        Format::Csv => {
            println!("equation,ell,theta,deviation,prob_budget,vacuous");
            for b in &rows {
                println!(
                    "{},{},{},{},{},{}",
                    b.equation, b.ell, b.theta, b.deviation, b.prob_budget, b.vacuous
                );
            }
        }
        Format::Table => {
            println!(
                "{:<9} {:>4} {:>15} {:>15} {:>15}  vacuous",
                "equation", "ell", "theta", "deviation", "prob_budget"
            );
            for b in &rows {
                println!(
                    "{:<9} {:>4} {:>15} {:>15} {:>15}  {}",
                    b.equation.to_string(),
                    b.ell,
                    fmt_sig9(b.theta),
                    fmt_sig9(b.deviation),
                    fmt_sig9(b.prob_budget),
                    if b.vacuous { "yes" } else { "no" }
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct PlanRow {
    equation: Equation,
    ell: usize,
    theta: f64,
    eps_rel: f64,
    n: u64,
}

fn cmd_plan(args: &PlanArgs) -> Result<ExitCode, Error> {
    let sp = args.input.resolve()?.spectrum()?;
    let d = sp.dim();
    let mut rows: Vec<PlanRow> = Vec::new();
    for equation in equations_or_all(&args.equations) {
        for ell in ells_for(equation, &sp, args.ell) {
            let theta = args.exponent.theta_for(equation, d, ell)?;
            let n = solve_n_for(&sp, equation, ell, theta, args.eps_rel)?;
            // Re-verify minimality before printing.
            debug_assert!(evaluate_bound(&sp, equation, n, theta, ell)?.deviation <= args.eps_rel);
            if n > 1 {
                debug_assert!(
                    evaluate_bound(&sp, equation, n - 1, theta, ell)?.deviation > args.eps_rel
                );
            }
            rows.push(PlanRow {
                equation,
                ell,
                theta,
                eps_rel: args.eps_rel,
                n,
            });
        }
    }

    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&rows).expect("serialize")
        ),
        Format::Csv => {
            println!("equation,ell,theta,eps_rel,n");
            for r in &rows {
                println!("{},{},{},{},{}", r.equation, r.ell, r.theta, r.eps_rel, r.n);
            }
        }
        Format::Table => {
            println!(
                "{:<9} {:>4} {:>15} {:>15} {:>12}",
                "equation", "ell", "theta", "eps_rel", "min_n"
            );
            for r in &rows {
                println!(
                    "{:<9} {:>4} {:>15} {:>15} {:>12}",
                    r.equation.to_string(),
                    r.ell,
                    fmt_sig9(r.theta),
                    fmt_sig9(r.eps_rel),
                    r.n
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let source = args.input.resolve()?;
    let cov = source.matrix()?;
    let thetas = match args.theta {
        Some(t) => vec![t],
        None => DEFAULT_THETA_GRID.to_vec(),
    };
    let cfg = TrialConfig::new(
        cov,
        args.n as usize,
        args.trials as usize,
        thetas,
        args.seed,
    )?;
    let mut reports = exceedance(&cfg)?;
    if let Some(picked) = &args.equations {
        let picked: Vec<Equation> = picked.iter().copied().map(Equation::from).collect();
        reports.retain(|r| picked.contains(&r.equation));
    }

    match args.format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&reports).expect("serialize")
            )
        }
        Format::Csv => print!("{}", reports_to_csv(&reports)),
        Format::Table => {
            println!(
                "{:<9} {:>15} {:>15} {:>15} {:>15} {:>15}  verdict",
                "event", "theta", "rate", "ci_low", "ci_high", "bound"
            );
            for r in &reports {
                println!(
                    "{:<9} {:>15} {:>15} {:>15} {:>15} {:>15}  {}",
                    r.event_id(),
                    fmt_sig9(r.theta),
                    fmt_sig9(r.empirical_rate),
                    fmt_sig9(r.ci_low),
                    fmt_sig9(r.ci_high),
                    fmt_sig9(r.bound),
                    r.verdict
                );
            }
        }
    }
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        eprintln!("covbound: CI-certified violation of a theoretical bound (implementation bug)");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
