//! `coefcont`: evaluate continued power series, build coefficient
//! interpolants and estimate growth from the command line.
//!
//! Exit codes: `0` success, `2` numerical failure (accuracy budget, failed
//! invariant or certificate), `3` usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::f64::consts::TAU;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coefcont::continuation::{InvariantCheck, Method};
use coefcont::growth::{growth_report, indicator_trace, RadialSchedule, Spacing};
use coefcont::interpolant::check_r_independence;
use coefcont::kernel::reciprocal_bound_constant;
use coefcont::{
    continue_at, lookup, parse_expr, phi_interpolant, verify_invariants, Complex64, ComplexFunction,
    ContinuationConfig, DecayCertificate, Error, FunctionExpr, InterpolantConfig, SeriesSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use output::{emit, print_json, sci};

#[derive(Parser)]
#[command(name = "coefcont", version, about = "Analytic continuation of power series via coefficient interpolants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continue a series to one point; prints JSON.
    Eval(EvalArgs),
    /// Continue a series on a rectangular grid; prints CSV or JSON.
    Grid(GridArgs),
    /// Run the invariant checks on a series; prints JSON.
    Verify(SeriesArgs),
    /// Growth estimates (ET, IET, indicator, order) of an expression.
    Growth(GrowthArgs),
    /// Evaluate the interpolant of a ray-decaying function at one point.
    Interp(InterpArgs),
    /// Check interpolation and r-independence of an interpolant.
    InterpCheck(InterpCheckArgs),
    /// Print the kernel bound constants for an exclusion radius.
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct SeriesArgs {
    /// Built-in series: geometric, log, dilog, expneg.
    #[arg(long, conflicts_with = "spec")]
    series: Option<String>,
    /// JSON series specification file: {"head": [[re, im], ...], "phi": "<expr>", "n0": n, "label": "..."}.
    #[arg(long)]
    spec: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    series: SeriesArgs,
    /// Target point "re,im" (or "re").
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// Split index; chosen automatically when absent.
    #[arg(long)]
    m: Option<usize>,
    /// Sector half-angle in (0, pi/2); chosen automatically when absent.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    quad_tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    series: SeriesArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
    re_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    re_max: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -3.0)]
    im_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 3.0)]
    im_max: f64,
    #[arg(long, default_value_t = 21)]
    n_re: usize,
    #[arg(long, default_value_t = 21)]
    n_im: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GrowthArgs {
    /// Function expression in z.
    #[arg(long)]
    f: String,
    /// Closed sector "theta1,theta2".
    #[arg(long, allow_hyphen_values = true, default_value = "-1.5707963267948966,1.5707963267948966")]
    sector: String,
    /// Decreasing margins for the inner type, "m1,m2,...".
    #[arg(long, default_value = "0.3,0.1,0.03")]
    margins: String,
    #[arg(long, default_value_t = 1.0)]
    r_min: f64,
    #[arg(long, default_value_t = 200.0)]
    r_max: f64,
    #[arg(long, default_value_t = 48)]
    count: usize,
    #[arg(long)]
    linear: bool,
    #[arg(long, default_value_t = 0.25)]
    tail_fraction: f64,
    #[arg(long, default_value_t = 32)]
    mesh: usize,
    /// Number of indicator angles (midpoints of equal parts of the sector).
    #[arg(long, default_value_t = 5)]
    indicators: usize,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Write the (R, log|f(R e^{i theta})|/R) trace at this angle as CSV.
    #[arg(long, allow_hyphen_values = true, requires = "trace_csv")]
    trace_theta: Option<f64>,
    #[arg(long)]
    trace_csv: Option<String>,
}

#[derive(Args)]
struct CertArgs {
    /// Boundary function g in z.
    #[arg(long)]
    g: String,
    /// Decay exponent in (0, 1/2).
    #[arg(long, default_value_t = 0.4)]
    eta: f64,
    /// Decay constant: |g(t e^{i theta})| <= M exp(-t^eta).
    #[arg(long = "M", default_value_t = std::f64::consts::E)]
    m_bound: f64,
    /// Ray angle in [-pi, pi).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 1e-12)]
    quad_tol: f64,
}

#[derive(Args)]
struct InterpArgs {
    #[command(flatten)]
    cert: CertArgs,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// Explicit ray truncation; certified automatically when absent.
    #[arg(long)]
    truncation: Option<f64>,
}

#[derive(Args)]
struct InterpCheckArgs {
    #[command(flatten)]
    cert: CertArgs,
    /// Radii for the independence check.
    #[arg(long, default_value = "0.3,0.5,0.7")]
    r_list: String,
    /// Check phi(n) against Laurent coefficients for n = -5..=n_max.
    #[arg(long, default_value_t = 12)]
    n_max: i32,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Exclusion radius around the integers.
    #[arg(long, default_value_t = 0.25)]
    r: f64,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Accuracy { .. }
            | Error::Certificate(_)
            | Error::Configuration(_)
            | Error::Evaluation { .. }
            | Error::PoleProximity { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

type CliResult = Result<(), Failure>;

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("invalid {what} '{text}'"))))
        .collect()
}

fn parse_point(text: &str) -> Result<Complex64, Failure> {
    match parse_list(text, "point")?.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(usage(format!("point '{text}' must be \"re,im\""))),
    }
}

fn load_series(args: &SeriesArgs) -> Result<SeriesSpec, Failure> {
    match (&args.series, &args.spec) {
        (Some(label), None) => Ok(lookup(label)?.spec.clone()),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
            Ok(SeriesSpec::from_json(&text)?)
        }
        _ => Err(usage("give exactly one of --series or --spec")),
    }
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    series: &'a str,
    z: Complex64,
    value: Complex64,
    err: f64,
    method: Method,
    config: Option<ContinuationConfig>,
}

fn eval(args: EvalArgs) -> CliResult {
    let spec = load_series(&args.series)?;
    let z = parse_point(&args.z)?;
    let cfg = if args.m.is_some() || args.theta.is_some() || args.quad_tol.is_some() {
        let mut cfg = ContinuationConfig::auto(&spec, z)?;
        if let Some(m) = args.m {
            cfg.m = m;
        }
        if let Some(t) = args.theta {
            cfg.theta = t;
        }
        if let Some(q) = args.quad_tol {
            cfg.quad_tol = q;
        }
        Some(cfg)
    } else {
        None
    };
    let res = continue_at(&spec, z, cfg.as_ref())?;
    print_json(&EvalOutput {
        series: spec.label(),
        z,
        value: res.value,
        err: res.error,
        method: res.method,
        config: res.config,
    });
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

#[derive(Serialize)]
struct GridRow {
    re: f64,
    im: f64,
    value: Option<Complex64>,
    err: f64,
    error: Option<String>,
}

fn grid(args: GridArgs) -> CliResult {
    let spec = load_series(&args.series)?;
    if args.n_re == 0 || args.n_im == 0 {
        return Err(usage("grid dimensions must be positive"));
    }
    let points: Vec<Complex64> = linspace(args.im_min, args.im_max, args.n_im)
        .into_iter()
        .flat_map(|im| linspace(args.re_min, args.re_max, args.n_re).into_iter().map(move |re| Complex64::new(re, im)))
        .collect();
    let rows: Vec<GridRow> = points
        .par_iter()
        .map(|&z| match continue_at(&spec, z, None) {
            Ok(r) => GridRow {
                re: z.re,
                im: z.im,
                value: Some(r.value),
                err: r.error,
                error: None,
            },
            Err(e) => GridRow {
                re: z.re,
                im: z.im,
                value: None,
                err: f64::NAN,
                error: Some(e.to_string()),
            },
        })
        .collect();
    match args.format {
        Format::Csv => {
            let mut text = String::from("re,im,F_re,F_im,err");
            for r in &rows {
                let v = r.value.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                text.push_str(&format!("\n{},{},{},{},{}", sci(r.re), sci(r.im), sci(v.re), sci(v.im), sci(r.err)));
            }
            emit(&text);
        }
        Format::Json => print_json(&rows),
    }
    let failed: Vec<&GridRow> = rows.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        eprintln!("{},{}: {}", r.re, r.im, r.error.as_deref().unwrap_or_default());
    }
    // Points on the cut are expected; anything else is a numerical failure.
    let numerical = failed
        .iter()
        .any(|r| !(r.im == 0.0 && r.re >= 1.0));
    if numerical {
        return Err(Failure {
            code: 2,
            message: format!("{} grid points failed", failed.len()),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    series: &'a str,
    passed: bool,
    checks: Vec<InvariantCheck>,
}

fn verify(args: SeriesArgs) -> CliResult {
    let spec = load_series(&args)?;
    let checks = verify_invariants(&spec);
    let passed = checks.iter().all(|c| c.passed);
    print_json(&VerifyOutput {
        series: spec.label(),
        passed,
        checks,
    });
    if passed {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            message: "invariant checks failed".into(),
        })
    }
}

fn growth(args: GrowthArgs) -> CliResult {
    let f = parse_expr(&args.f)?;
    let sector = match parse_list(&args.sector, "sector")?.as_slice() {
        [a, b] => (*a, *b),
        _ => return Err(usage("sector must be \"theta1,theta2\"")),
    };
    let margins = parse_list(&args.margins, "margins")?;
    let spacing = if args.linear { Spacing::Linear } else { Spacing::Geometric };
    let sched = RadialSchedule::with_tail(args.r_min, args.r_max, args.count, spacing, args.tail_fraction)?;
    let report = growth_report(&f, sector, &margins, &sched, args.mesh, args.indicators)?;
    if args.json {
        print_json(&report);
    } else {
        let mut lines = vec![
            format!("function        {}", report.function),
            format!("sector          [{:.6}, {:.6}]", sector.0, sector.1),
            format!(
                "schedule        {:?} R in [{}, {}], {} radii, tail {}",
                sched.spacing, sched.r_min, sched.r_max, sched.count, sched.tail_fraction
            ),
            format!("ET              {:.6}", report.et_estimate),
            format!("IET             {:.6}", report.iet_estimate),
        ];
        lines.extend(report.iet_ladder.iter().map(|(m, v)| format!("  margin {m:<8} {v:.6}")));
        lines.extend(report.indicator_samples.iter().map(|(t, h)| format!("h({t:+.6})    {h:.6}")));
        lines.push(match report.order_estimate {
            Some(o) => format!("order           {o:.6}"),
            None => "order           n/a (not entire)".into(),
        });
        emit(&lines.join("\n"));
    }
    if let (Some(theta), Some(path)) = (args.trace_theta, &args.trace_csv) {
        let trace = indicator_trace(&f, theta, &sched)?;
        let mut text = String::from("R,value\n");
        for (r, v) in trace {
            text.push_str(&format!("{},{}\n", sci(r), sci(v)));
        }
        fs::write(path, text).map_err(|e| usage(format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

fn certified(args: &CertArgs, start: f64) -> Result<(FunctionExpr, DecayCertificate), Failure> {
    let g = parse_expr(&args.g)?;
    let cert = DecayCertificate::new(args.m_bound, args.eta, args.theta)?.verify_span(&g, start.min(1e-3), 1e6)?;
    Ok((g, cert))
}

#[derive(Serialize)]
struct InterpOutput {
    z: Complex64,
    value: Complex64,
    err_estimate: f64,
    config: InterpolantConfig,
    radius: f64,
    truncation: f64,
    certificate: DecayCertificate,
}

fn interp(args: InterpArgs) -> CliResult {
    let (g, cert) = certified(&args.cert, args.r)?;
    let z = parse_point(&args.z)?;
    let cfg = InterpolantConfig {
        quad_tol: args.cert.quad_tol,
        ray_truncation: args.truncation,
        ..InterpolantConfig::new(args.r, args.cert.theta)
    };
    let v = phi_interpolant(&g, &cert, &cfg, z)?;
    print_json(&InterpOutput {
        z,
        value: v.value,
        err_estimate: v.error,
        config: cfg,
        radius: v.radius,
        truncation: v.truncation,
        certificate: cert,
    });
    Ok(())
}

#[derive(Serialize)]
struct CoefficientCheck {
    n: i32,
    phi: Complex64,
    laurent: Complex64,
    deviation: f64,
    passed: bool,
}

#[derive(Serialize)]
struct IndependenceCheck {
    z: Complex64,
    r_list: Vec<f64>,
    deviation: f64,
    passed: bool,
}

#[derive(Serialize)]
struct InterpCheckOutput {
    passed: bool,
    coefficients: Vec<CoefficientCheck>,
    r_independence: Vec<IndependenceCheck>,
}

/// Laurent coefficient `(1/2 pi i) int_{|zeta| = r} g zeta^{-n-1} dzeta` by the
/// trapezoidal rule, which converges geometrically for periodic integrands.
fn laurent_coefficient(g: &dyn ComplexFunction, r: f64, n: i32, nodes: usize) -> Result<Complex64, Error> {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let t = TAU * k as f64 / nodes as f64;
        let w = Complex64::from_polar(r, t);
        acc += g.eval(w)? * w.powi(-n);
    }
    Ok(acc / nodes as f64)
}

fn interp_check(args: InterpCheckArgs) -> CliResult {
    let r_list = parse_list(&args.r_list, "r-list")?;
    let r0 = r_list.first().copied().ok_or_else(|| usage("empty r-list"))?;
    let (g, cert) = certified(&args.cert, r_list.iter().copied().fold(f64::INFINITY, f64::min))?;
    let cfg = InterpolantConfig {
        quad_tol: args.cert.quad_tol,
        ..InterpolantConfig::new(r0, args.cert.theta)
    };
    let coefficients = (-5..=args.n_max)
        .map(|n| {
            let phi = phi_interpolant(&g, &cert, &cfg, Complex64::new(n as f64, 0.0))?.value;
            let laurent = laurent_coefficient(&g, r0, n, 256)?;
            let deviation = (phi - laurent).norm();
            Ok(CoefficientCheck {
                n,
                phi,
                laurent,
                deviation,
                passed: deviation < args.tol,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let r_independence = [Complex64::new(1.5, 0.5), Complex64::new(-0.7, 0.3), Complex64::new(2.5, -1.0)]
        .into_iter()
        .map(|z| {
            let deviation = check_r_independence(&g, &cert, args.cert.theta, z, &r_list, args.cert.quad_tol)?;
            Ok(IndependenceCheck {
                z,
                r_list: r_list.clone(),
                deviation,
                passed: deviation < args.tol,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let passed = coefficients.iter().all(|c| c.passed) && r_independence.iter().all(|c| c.passed);
    print_json(&InterpCheckOutput {
        passed,
        coefficients,
        r_independence,
    });
    if passed {
        Ok(())
    } else {
        Err(Failure {
            code: 2,
            message: "interpolant checks failed".into(),
        })
    }
}

fn constants(args: ConstantsArgs) -> CliResult {
    print_json(&reciprocal_bound_constant(args.r)?);
    Ok(())
}

fn configure_threads() -> CliResult {
    let Ok(text) = std::env::var("CONTINUE_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("CONTINUE_THREADS must be a positive integer, got '{text}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("cannot configure {n} threads: {e}")))
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Eval(a) => eval(a),
        Command::Grid(a) => grid(a),
        Command::Verify(a) => verify(a),
        Command::Growth(a) => growth(a),
        Command::Interp(a) => interp(a),
        Command::InterpCheck(a) => interp_check(a),
        Command::Constants(a) => constants(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
