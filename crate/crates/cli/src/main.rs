mod manifest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use manifest::{now, RunManifest};
use piterbarg_core::rate_study::rate_points_csv;
use piterbarg_core::stats::Z_95;
use piterbarg_core::{
    estimate_constant, piterbarg_bm_full, piterbarg_bm_half, plan_budget, plan_horizon, rate_constant, run_gap_decay,
    run_rate_study_bm, total_budget, Domain, Error, EstimatorConfig, Method,
};

/// Monte Carlo estimation of Piterbarg constants for fractional Brownian motion.
#[derive(Parser)]
#[command(name = "piterbarg", version, arg_required_else_help = true)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "PITERBARG_THREADS")]
    threads: Option<usize>,

    /// Check a JSON manifest or CSV table written by this tool and exit.
    #[arg(long, value_name = "FILE")]
    check_manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the constant on delta Z within [-T, T] and report the error budget.
    Estimate(EstimateArgs),
    /// Compare the bias-corrected Brownian estimate (alpha = 1) with its closed form.
    Validate(ValidateArgs),
    /// Brownian rate study over nested spacings; writes a CSV table.
    Rate(RateArgs),
    /// Error budget for a spacing without simulating.
    Plan(PlanArgs),
    /// Paired discretization gaps for general alpha.
    GapDecay(GapDecayArgs),
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Constants {
    /// Discretization constant (default 1, flagged as uncalibrated).
    #[arg(long)]
    c_disc: Option<f64>,
    /// Truncation constant (default 1, flagged as uncalibrated).
    #[arg(long)]
    c_trunc: Option<f64>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    d: f64,
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    #[arg(long)]
    delta: f64,
    /// Defaults to (-ln delta)^(2/alpha).
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    constants: Constants,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    d: f64,
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    d: f64,
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    /// Comma-separated, decreasing, each a power-of-two multiple of the last.
    #[arg(long, value_delimiter = ',', required = true)]
    deltas: Vec<f64>,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    horizon: Option<f64>,
    #[command(flatten)]
    constants: Constants,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GapDecayArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    d: f64,
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    #[arg(long, value_delimiter = ',', required = true)]
    deltas: Vec<f64>,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::Domain(_) | Error::NotNested(_) | Error::ConfigMismatch => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Numerical(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_manifest(output: &Output, manifest: &RunManifest) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    emit(output, &text)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn horizon_or_default(horizon: Option<f64>, delta: f64, alpha: f64) -> Result<f64, Failure> {
    match horizon {
        Some(t) => Ok(t),
        None => Ok(plan_horizon(delta, alpha)?),
    }
}

fn estimate(args: EstimateArgs) -> Result<bool, Failure> {
    let started = now();
    let config = EstimatorConfig {
        alpha: args.alpha,
        d: args.d,
        domain: args.domain,
        delta: args.delta,
        horizon: horizon_or_default(args.horizon, args.delta, args.alpha)?,
        replications: args.reps,
        seed: args.seed,
    };
    let result = estimate_constant(&config)?;
    if let Some(w) = &result.warning {
        eprintln!("warning: {w}");
    }
    let budget = total_budget(&config, &result, args.constants.c_disc, args.constants.c_trunc)?;
    let results = json!({ "estimate": to_value(&result), "budget": to_value(&budget) });
    emit_manifest(&args.output, &RunManifest::new("estimate", to_value(&config), started, results))?;
    Ok(true)
}

/// Relative tolerance floor of the validation check.
const VALIDATE_FLOOR: f64 = 0.015;

fn validate(args: ValidateArgs) -> Result<bool, Failure> {
    let started = now();
    let config = EstimatorConfig {
        alpha: 1.0,
        d: args.d,
        domain: args.domain,
        delta: args.delta,
        horizon: horizon_or_default(args.horizon, args.delta, 1.0)?,
        replications: args.reps,
        seed: args.seed,
    };
    let result = estimate_constant(&config)?;
    let target = match args.domain {
        Domain::HalfLine => piterbarg_bm_half(args.d)?,
        Domain::FullLine => piterbarg_bm_full(args.d)?,
    };
    let rate = rate_constant().value;
    let factor = 1.0 + rate * args.delta.sqrt();
    let corrected = result.estimate * factor;
    // One standard error of the corrected estimate; for median-of-means the
    // 95% half-width is converted to the normal-equivalent scale.
    let sigma = match result.method {
        Method::SampleMean => result.stderr,
        Method::MedianOfMeans => result.stat_error().map(|h| h / Z_95),
    }
    .unwrap_or(f64::INFINITY)
        * factor;
    let floor = VALIDATE_FLOOR * target;
    let tolerance = (3.0 * sigma).max(floor);
    let deviation = (corrected - target).abs();
    let status = if !(sigma <= floor) {
        eprintln!(
            "warning: statistical error {sigma:.3e} exceeds the {:.1}% tolerance floor {floor:.3e}; increase --reps",
            100.0 * VALIDATE_FLOOR
        );
        "inconclusive"
    } else if deviation <= tolerance {
        "pass"
    } else {
        "fail"
    };
    let results = json!({
        "estimate": to_value(&result),
        "rate_constant": rate,
        "correction_factor": factor,
        "corrected_estimate": corrected,
        "target": target,
        "sigma": if sigma.is_finite() { json!(sigma) } else { Value::Null },
        "tolerance": if tolerance.is_finite() { json!(tolerance) } else { Value::Null },
        "deviation": deviation,
        "status": status,
    });
    emit_manifest(&args.output, &RunManifest::new("validate", to_value(&config), started, results))?;
    eprintln!("validate: {status} (corrected {corrected:.6} vs {target:.6})");
    Ok(status != "fail")
}

fn rate(args: RateArgs) -> Result<bool, Failure> {
    let points = run_rate_study_bm(args.d, args.domain, &args.deltas, args.reps, args.seed)?;
    for p in points.iter().filter(|p| p.below_noise) {
        eprintln!("warning: gap at delta {} is below -3 standard errors", p.delta);
    }
    emit(&args.output, &rate_points_csv(&points))?;
    Ok(true)
}

fn plan(args: PlanArgs) -> Result<bool, Failure> {
    let started = now();
    let budget = plan_budget(args.delta, args.alpha, args.horizon, args.constants.c_disc, args.constants.c_trunc)?;
    let config = json!({
        "alpha": args.alpha,
        "delta": args.delta,
        "horizon": args.horizon,
        "c_disc": args.constants.c_disc,
        "c_trunc": args.constants.c_trunc,
    });
    let results = json!({ "budget": to_value(&budget) });
    emit_manifest(&args.output, &RunManifest::new("plan", config, started, results))?;
    Ok(true)
}

fn gap_decay(args: GapDecayArgs) -> Result<bool, Failure> {
    let started = now();
    let report = run_gap_decay(args.alpha, args.d, args.domain, &args.deltas, args.reps, args.seed)?;
    let config = json!({
        "alpha": args.alpha,
        "d": args.d,
        "domain": args.domain,
        "deltas": args.deltas,
        "replications": args.reps,
        "seed": args.seed,
    });
    let results = json!({ "report": to_value(&report) });
    emit_manifest(&args.output, &RunManifest::new("gap-decay", config, started, results))?;
    Ok(true)
}

fn check_manifest(path: PathBuf) -> Result<bool, Failure> {
    let text = fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    match manifest::check(&text) {
        Ok(what) => {
            println!("ok: {} ({what})", path.display());
            Ok(true)
        }
        Err(why) => {
            println!("invalid: {} ({why})", path.display());
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool");
    }
    let outcome = match (cli.check_manifest, cli.command) {
        (Some(_), Some(_)) => Err(Failure::Usage("--check-manifest cannot be combined with a subcommand".into())),
        (Some(path), None) => check_manifest(path),
        (None, Some(Command::Estimate(a))) => estimate(a),
        (None, Some(Command::Validate(a))) => validate(a),
        (None, Some(Command::Rate(a))) => rate(a),
        (None, Some(Command::Plan(a))) => plan(a),
        (None, Some(Command::GapDecay(a))) => gap_decay(a),
        (None, None) => Err(Failure::Usage("a subcommand or --check-manifest is required".into())),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
