//! Command-line front end: zeros, boundary traces, verification suites and
//! single-point evaluation.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input or a
//! numerical domain/accuracy error, 3 a trace was truncated (the partial
//! trajectory is still written).

pub mod format;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pearcey_core::boundary::{
    closed_form_trajectory, restart_at, trace_abel, trace_rayleigh, AbelOptions,
    BoundaryTrajectory, ClosedBoundary, Sign, TraceOptions,
};
use pearcey_core::evolve::{kernel_by_name, EvolvedKernel, Kernel};
use pearcey_core::kernels::{airy_ai_prime_zeros, airy_ai_zeros, phi4_zeros, ZeroList};
use pearcey_core::verify::{
    airy4_identity_report, check_hermite_discrepancy, check_hit_identities, check_scaled_limit,
    check_zero_residual, heat_report, HermiteDiscrepancy, ResidualReport, ScaledValue,
};
use pearcey_core::{Error, Result};
use serde::Serialize;

use crate::format::{
    sig15, trajectory_csv, Metadata, Tolerances, TrajectoryDocument, Truncation, FORMAT_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

/// Caps the worker threads used for parallel evaluation.
pub const THREADS_ENV: &str = "PEARCEY_TRACE_THREADS";

/// Past this horizon the Rayleigh equation drifts off the zero set without projection.
const AUTO_PROJECTION_HORIZON: f64 = 5.0;
const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "pearcey",
    version,
    about = "Moving zero boundaries of heat-evolved Airy-type kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First n zeros of φ (positive), Ai or Ai′ (negative axis).
    Zeros(ZerosArgs),
    /// Trace a zero boundary and write it as CSV or JSON.
    Trace(TraceArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Evaluate v or an x-derivative at a single point.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroFunction {
    Phi,
    Ai,
    AiPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Positive,
    Negative,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Positive => Sign::Positive,
            SignArg::Negative => Sign::Negative,
        }
    }
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[arg(short, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ZeroFunction::Phi)]
    pub function: ZeroFunction,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long, default_value = "pearcey")]
    pub kernel: String,
    /// 1-based index of the seeding zero.
    #[arg(long, default_value_t = 1)]
    pub zero_index: usize,
    #[arg(long, value_enum, default_value_t = SignArg::Positive)]
    pub sign: SignArg,
    #[arg(long, default_value_t = 4.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = pearcey_core::boundary::DEFAULT_DT)]
    pub dt: f64,
    /// Relative integrator tolerance; the absolute one is 1% of it.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Re-seed from a root of v at this time and trace [T − ε, T + ε].
    #[arg(long)]
    pub restart: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub epsilon: f64,
    /// Project onto the zero set every K samples: `auto`, `off` or K.
    #[arg(long, default_value = "auto")]
    pub project: String,
    /// Constant of the parabolic closed-form boundaries (default from the Ai zero).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Starting value of the Abel trace (default: the n-th zero of Ai′).
    #[arg(long, allow_hyphen_values = true)]
    pub f0: Option<f64>,
    /// Slope b of the linear-boundary kernel.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub slope: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub zero_residual: bool,
    #[arg(long)]
    pub identities: bool,
    #[arg(long)]
    pub scaled_limit: bool,
    #[arg(long)]
    pub hermite_discrepancy: bool,
    #[arg(long, default_value_t = 1)]
    pub zero_index: usize,
    #[arg(long, default_value_t = 4.0)]
    pub t_end: f64,
    /// Airy zero used by the scaled-limit check.
    #[arg(long, default_value_t = -2.33811, allow_hyphen_values = true)]
    pub xi: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0])]
    pub times: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value = "pearcey")]
    pub kernel: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 0)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub slope: f64,
}

/// Runs a parsed command, writing results to `stdout` or the requested file.
pub fn run(cli: Cli, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32 {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let pool = match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        _ => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_INPUT;
        }
    };
    let outcome = pool.install(|| match cli.command {
        Command::Zeros(a) => cmd_zeros(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Eval(a) => cmd_eval(&a),
    });
    emit(outcome, stdout, stderr)
}

/// What a command produced: the text to write, where, and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub out: Option<PathBuf>,
    pub code: i32,
    pub message: Option<String>,
}

fn emit(
    outcome: std::result::Result<Outcome, String>,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> i32 {
    let outcome = match outcome {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    if let Some(msg) = &outcome.message {
        let _ = writeln!(stderr, "{msg}");
    }
    match &outcome.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.body) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = stdout.write_all(outcome.body.as_bytes());
        }
    }
    outcome.code
}

fn input_error(e: Error) -> String {
    e.to_string()
}

pub fn cmd_zeros(args: &ZerosArgs) -> std::result::Result<Outcome, String> {
    if args.n == 0 {
        return Err("n must be at least 1".into());
    }
    let result = match args.function {
        ZeroFunction::Phi => phi4_zeros(args.n),
        ZeroFunction::Ai => airy_ai_zeros(args.n),
        ZeroFunction::AiPrime => airy_ai_prime_zeros(args.n),
    };
    let (zeros, code, message) = match result {
        Ok(z) => (z, EXIT_OK, None),
        Err(Error::NotFound { found, requested }) => {
            let msg = format!("found only {} of {requested} zeros", found.len());
            (
                ZeroList {
                    values: found,
                    achieved_tolerance: f64::NAN,
                },
                EXIT_INPUT,
                Some(msg),
            )
        }
        Err(e) => return Err(input_error(e)),
    };
    let body = match args.format {
        OutputFormat::Csv => {
            let mut s = String::from("index,zero\n");
            for (i, z) in zeros.values.iter().enumerate() {
                s.push_str(&format!("{},{}\n", i + 1, sig15(*z)));
            }
            s
        }
        OutputFormat::Json => to_json(&zeros)?,
    };
    Ok(Outcome {
        body,
        out: args.out.clone(),
        code,
        message,
    })
}

fn to_json<T: Serialize>(value: &T) -> std::result::Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| e.to_string())
}

fn nth(list: Result<ZeroList>, n: usize) -> Result<f64> {
    Ok(list?.values[n - 1])
}

fn trace_options(args: &TraceArgs, horizon: f64) -> std::result::Result<TraceOptions, String> {
    if !(args.tol > 0.0) {
        return Err(format!("--tol must be positive, got {}", args.tol));
    }
    let opts = TraceOptions::default()
        .with_dt(args.dt)
        .with_tolerances(args.tol, 0.01 * args.tol);
    match args.project.as_str() {
        "auto" if horizon > AUTO_PROJECTION_HORIZON => Ok(opts.with_projection(1)),
        "auto" | "off" => Ok(opts),
        k => match k.parse::<usize>() {
            Ok(k) if k > 0 => Ok(opts.with_projection(k)),
            _ => Err(format!(
                "--project expects auto, off or a positive integer, got {k:?}"
            )),
        },
    }
}

/// Traces the boundary described by `args`, filling residuals against the matching kernel.
pub fn build_trajectory(
    args: &TraceArgs,
) -> (Result<BoundaryTrajectory>, Box<dyn Kernel>, TraceOptions) {
    let fallback = TraceOptions::default();
    let kernel = match kernel_by_name(&args.kernel, args.slope) {
        Ok(k) => k,
        Err(e) => return (Err(e), Box::new(EvolvedKernel::pearcey()), fallback),
    };
    let horizon = args.restart.map_or(args.t_end, |t| t + args.epsilon);
    let opts = match trace_options(args, horizon) {
        Ok(o) => o,
        Err(msg) => return (Err(Error::Domain(msg)), kernel, fallback),
    };
    let result = trace_for_kernel(args, kernel.as_ref(), &opts);
    (result, kernel, opts)
}

fn trace_for_kernel(
    args: &TraceArgs,
    kernel: &dyn Kernel,
    opts: &TraceOptions,
) -> Result<BoundaryTrajectory> {
    let n = args.zero_index;
    if n == 0 {
        return Err(Error::Domain("--zero-index is 1-based".into()));
    }
    if !(args.t_end > 0.0 && args.dt > 0.0) {
        return Err(Error::Domain(format!(
            "--t-end and --dt must be positive (got {}, {})",
            args.t_end, args.dt
        )));
    }
    let sign = Sign::from(args.sign);
    let base = args.kernel.trim_end_matches("-closed");
    let mut traj = match (base, args.restart) {
        ("pearcey" | "quartic", Some(t)) => {
            let xi_ai = nth(airy_ai_zeros(n), n)?;
            let traj = restart_at(t, xi_ai, args.epsilon, kernel, opts)?;
            if sign == Sign::Negative {
                traj.mirrored()
            } else {
                traj
            }
        }
        (_, Some(_)) => {
            return Err(Error::Domain(format!(
                "--restart applies to the pearcey kernel, not {}",
                args.kernel
            )))
        }
        ("pearcey" | "quartic", None) => {
            let xi = nth(phi4_zeros(n), n)? * sign.factor();
            trace_rayleigh(xi, args.t_end, opts)?
        }
        ("airy3" | "airy-cubic", None) => {
            let c = match args.c {
                Some(c) => c,
                None => nth(airy_ai_zeros(n), n)?,
            };
            closed_form_trajectory(ClosedBoundary::Airy3 { c }, 0.0, args.t_end, args.dt)?
        }
        ("shifted-cubic", None) => {
            let c = match args.c {
                Some(c) => c,
                None => nth(airy_ai_zeros(n), n)? - 0.25,
            };
            closed_form_trajectory(ClosedBoundary::Shifted { c }, 0.0, args.t_end, args.dt)?
        }
        ("hermite" | "hermite-gauss", None) => {
            if n != 1 {
                return Err(Error::Domain(
                    "the Hermite–Gauss kernel has a single pair of zeros".into(),
                ));
            }
            // the two branches merge at t = 2 and the zero pair disappears
            let boundary = ClosedBoundary::Hermite { sign };
            if args.t_end > 2.0 {
                let mut partial = closed_form_trajectory(boundary, 0.0, 2.0, args.dt)?;
                partial.branch.index = n;
                return Err(Error::Singularity {
                    t: 2.0,
                    f: 0.0,
                    partial: Box::new(partial),
                });
            }
            closed_form_trajectory(boundary, 0.0, args.t_end, args.dt)?
        }
        ("linear", None) => closed_form_trajectory(
            ClosedBoundary::Linear { slope: args.slope },
            args.dt,
            args.t_end,
            args.dt,
        )?,
        ("airy-prime", None) => {
            let f0 = match args.f0 {
                Some(c) => c,
                None => nth(airy_ai_prime_zeros(n), n)?,
            };
            let abel = AbelOptions {
                dt: args.dt,
                ..AbelOptions::default()
            };
            trace_abel(f0, args.t_end, &abel)?
        }
        _ => {
            return Err(Error::Domain(format!(
                "no tracer for kernel {}",
                args.kernel
            )))
        }
    };
    traj.branch.index = n;
    traj.kernel = kernel.name();
    Ok(traj)
}

pub fn cmd_trace(args: &TraceArgs) -> std::result::Result<Outcome, String> {
    let (result, kernel, opts) = build_trajectory(args);
    let (mut traj, truncated, code) = match result {
        Ok(t) => (t, None, EXIT_OK),
        Err(e) => match e.partial_trajectory() {
            Some(partial) => {
                let t = match &e {
                    Error::BlowUp { t, .. } | Error::Singularity { t, .. } => *t,
                    _ => f64::NAN,
                };
                (
                    partial.clone(),
                    Some(Truncation {
                        t,
                        reason: e.to_string(),
                    }),
                    EXIT_TRUNCATED,
                )
            }
            None => return Err(e.to_string()),
        },
    };
    if traj.kernel.is_empty() {
        traj.kernel = kernel.name();
    }
    check_zero_residual(&mut traj, kernel.as_ref(), RESIDUAL_TOL);
    let body = match args.format {
        OutputFormat::Csv => {
            let mut s = trajectory_csv(&traj);
            if let Some(tr) = &truncated {
                s.push_str(&format!(
                    "# TRUNCATED at t={}: {}\n",
                    sig15(tr.t),
                    tr.reason
                ));
            }
            s
        }
        OutputFormat::Json => {
            let sign = match traj.branch.sign {
                Sign::Positive => "positive",
                Sign::Negative => "negative",
            };
            let doc = TrajectoryDocument {
                metadata: Metadata {
                    kernel: args.kernel.clone(),
                    zero_index: args.zero_index,
                    sign: sign.into(),
                    method: serde_json::to_value(traj.method)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default(),
                    tolerances: Tolerances {
                        rtol: opts.rtol,
                        atol: opts.atol,
                        residual: RESIDUAL_TOL,
                    },
                    dt: args.dt,
                    format_version: FORMAT_VERSION,
                    tool_version: env!("CARGO_PKG_VERSION").into(),
                },
                trajectory: traj,
                truncated: truncated.clone(),
            };
            doc.to_json().map_err(|e| e.to_string())?
        }
    };
    let message = truncated.map(|t| format!("trace truncated at t={}: {}", t.t, t.reason));
    Ok(Outcome {
        body,
        out: args.out.clone(),
        code,
        message,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledLimitReport {
    pub xi: f64,
    pub values: Vec<ScaledValue>,
    /// `|values|` strictly decreasing in t.
    pub decreasing: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HermiteReport {
    #[serde(flatten)]
    pub detail: HermiteDiscrepancy,
    pub stated_formula_fails: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VerifyDocument {
    pub reports: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled_limit: Option<ScaledLimitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermite_discrepancy: Option<HermiteReport>,
    pub pass: bool,
}

pub fn cmd_verify(args: &VerifyArgs) -> std::result::Result<Outcome, String> {
    let all =
        !(args.zero_residual || args.identities || args.scaled_limit || args.hermite_discrepancy);
    let mut doc = VerifyDocument::default();

    if all || args.zero_residual {
        let n = args.zero_index;
        if n == 0 {
            return Err("--zero-index is 1-based".into());
        }
        let xi = nth(phi4_zeros(n), n).map_err(input_error)?;
        let kernel = EvolvedKernel::pearcey();
        let opts = if args.t_end > AUTO_PROJECTION_HORIZON {
            TraceOptions::default().with_projection(1)
        } else {
            TraceOptions::default()
        };
        let mut traj = trace_rayleigh(xi, args.t_end, &opts).map_err(input_error)?;
        doc.reports
            .push(check_zero_residual(&mut traj, &kernel, RESIDUAL_TOL));
        doc.reports
            .push(check_hit_identities(&traj, &kernel, RESIDUAL_TOL));
    }
    if all || args.identities {
        let xs: Vec<f64> = (-3..=3).map(f64::from).collect();
        doc.reports
            .push(airy4_identity_report(&[0.0, 1.0, 2.0], &xs, 1e-8));
        let ts = [0.5, 1.0, 2.0, 3.0, 4.0];
        let xs = [-3.0, -1.5, 0.0, 1.5, 3.0];
        for name in pearcey_core::evolve::REGISTERED_KERNELS {
            let kernel = kernel_by_name(name, 0.5).map_err(input_error)?;
            doc.reports
                .push(heat_report(kernel.as_ref(), &ts, &xs, 1e-4));
        }
    }
    if all || args.scaled_limit {
        let values = check_scaled_limit(args.xi, &args.times).map_err(input_error)?;
        let decreasing = values
            .windows(2)
            .all(|w| w[1].value.abs() < w[0].value.abs());
        doc.scaled_limit = Some(ScaledLimitReport {
            xi: args.xi,
            values,
            decreasing,
            pass: decreasing,
        });
    }
    if all || args.hermite_discrepancy {
        let detail = check_hermite_discrepancy(1e-10);
        let pass = detail.confirmed();
        doc.hermite_discrepancy = Some(HermiteReport {
            stated_formula_fails: !detail.stated.pass,
            detail,
            pass,
        });
    }

    doc.pass = doc.reports.iter().all(|r| r.pass)
        && doc.scaled_limit.as_ref().is_none_or(|s| s.pass)
        && doc.hermite_discrepancy.as_ref().is_none_or(|h| h.pass);
    let code = if doc.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    };
    let failed: Vec<&str> = doc
        .reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.check.as_str())
        .collect();
    let message = (!doc.pass).then(|| format!("verification failed: {failed:?}"));
    Ok(Outcome {
        body: to_json(&doc)?,
        out: args.out.clone(),
        code,
        message,
    })
}

pub fn cmd_eval(args: &EvalArgs) -> std::result::Result<Outcome, String> {
    let kernel = kernel_by_name(&args.kernel, args.slope).map_err(input_error)?;
    let est = kernel
        .evaluate(args.t, args.x, args.order)
        .map_err(input_error)?;
    Ok(Outcome {
        body: format!("{} {}\n", sig15(est.value), sig15(est.error)),
        out: None,
        code: EXIT_OK,
        message: None,
    })
}
