//! Worked examples: series with known interpolants and closed-form sums.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::continuation::{NeumaierSum, SeriesSpec};
use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::function::{ComplexFunction, CutRay, SharedFunction};
use crate::interpolant::exp_neg_interpolant;

const PI2_6: f64 = PI * PI / 6.0;

/// The dilogarithm `Li_2(z) = sum z^n / n^2`, principal branch, cut `[1, inf)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dilog;

/// `B_{2k} / (2k+1)!` for `k = 1..`, from `B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}`.
fn bernoulli_coefficients() -> &'static [f64] {
    static COEF: OnceLock<Vec<f64>> = OnceLock::new();
    COEF.get_or_init(|| {
        (1..=24)
            .map(|k| {
                let s: i32 = 2 * k;
                let zeta = match k {
                    1 => PI2_6,
                    2 => PI.powi(4) / 90.0,
                    _ => (1..=64).map(|n| (n as f64).powi(-s)).sum::<f64>(),
                };
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * zeta / ((s + 1) as f64 * TAU.powi(s))
            })
            .collect()
    })
}

fn dilog_series(z: Complex64) -> Complex64 {
    let mut acc = NeumaierSum::default();
    let mut power = z;
    for n in 1..200 {
        let term = power / (n * n) as f64;
        acc.add(term);
        if term.norm() < 1e-18 * acc.value().norm() {
            break;
        }
        power *= z;
    }
    acc.value()
}

/// `sum B_n u^{n+1} / (n+1)!` with `u = -log(1 - z)`, valid for `|u| < 2 pi`.
fn dilog_bernoulli(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut acc = NeumaierSum::default();
    acc.add(u);
    acc.add(-u2 / 4.0);
    let mut power = u * u2;
    for &c in bernoulli_coefficients() {
        let term = power * c;
        acc.add(term);
        if term.norm() < 1e-18 * acc.value().norm() {
            break;
        }
        power *= u2;
    }
    acc.value()
}

impl Dilog {
    pub fn value(z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re > 1.0 {
            return Err(Error::Domain(format!("Li_2 is evaluated off its cut [1, inf), got {z}")));
        }
        if z == Complex64::new(1.0, 0.0) {
            return Ok(Complex64::new(PI2_6, 0.0));
        }
        let r = z.norm();
        Ok(if r <= 0.5 {
            dilog_series(z)
        } else if r > 1.0 {
            let l = (-z).ln();
            -PI2_6 - 0.5 * l * l - Dilog::value(z.inv())?
        } else if z.re > 0.5 {
            let w = Complex64::new(1.0, 0.0) - z;
            PI2_6 - z.ln() * w.ln() - Dilog::value(w)?
        } else {
            dilog_bernoulli(z)
        })
    }
}

impl ComplexFunction for Dilog {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Dilog::value(z)
    }

    fn cut_rays(&self) -> Vec<CutRay> {
        vec![CutRay {
            origin: Complex64::new(1.0, 0.0),
            angle: 0.0,
        }]
    }

    fn describe(&self) -> String {
        "Li2(z)".into()
    }
}

/// A series together with the closed form of its continuation.
#[derive(Clone)]
pub struct ExampleEntry {
    pub label: String,
    pub spec: SeriesSpec,
    pub closed_form: SharedFunction,
    pub notes: String,
}

impl std::fmt::Debug for ExampleEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExampleEntry")
            .field("label", &self.label)
            .field("spec", &self.spec)
            .field("closed_form", &self.closed_form.describe())
            .finish()
    }
}

/// Twenty fixed points in the unit disc, radii in `[0.1, 0.8]`.
pub fn consistency_points() -> Vec<Complex64> {
    let golden = PI * (3.0 - 5.0f64.sqrt());
    (0..20)
        .map(|k| Complex64::from_polar(0.1 + 0.7 * k as f64 / 19.0, golden * k as f64))
        .collect()
}

impl ExampleEntry {
    /// Compare `closed_form` with summation of the series at
    /// [`consistency_points`]; the largest deviation must stay below `tol`.
    pub fn check_consistency(&self, tol: f64) -> Result<f64> {
        let points = consistency_points();
        let rmax = points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut coef = Vec::new();
        let mut quiet = 0;
        for n in 0..5000usize {
            let a = self.spec.coefficient(n)?;
            coef.push(a);
            if n >= self.spec.head().len().max(self.spec.n0()) && a.norm() * rmax.powi(n as i32) < 1e-18 {
                quiet += 1;
                if quiet >= 5 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        let mut worst = 0.0f64;
        for z in points {
            let mut acc = NeumaierSum::default();
            let mut power = Complex64::new(1.0, 0.0);
            for a in &coef {
                acc.add(a * power);
                power *= z;
            }
            let closed = self.closed_form.eval(z)?;
            let dev = (acc.value() - closed).norm();
            if !(dev < tol) {
                return Err(Error::Spec(format!(
                    "{}: closed form {closed} differs from the series {} at {z} by {dev:e}",
                    self.label,
                    acc.value()
                )));
            }
            worst = worst.max(dev);
        }
        Ok(worst)
    }
}

fn entry(label: &str, spec: SeriesSpec, closed_form: SharedFunction, notes: &str) -> ExampleEntry {
    ExampleEntry {
        label: label.into(),
        spec,
        closed_form,
        notes: notes.into(),
    }
}

fn build_registry() -> Result<Vec<ExampleEntry>> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let expneg_phi: SharedFunction = Arc::new(exp_neg_interpolant()?);
    let entries = vec![
        entry(
            "geometric",
            SeriesSpec::from_expr(vec![one], "1", 0, "geometric")?,
            Arc::new(parse_expr("1/(1 - z)")?),
            "a_n = 1, phi = 1, F = 1/(1 - z)",
        ),
        entry(
            "log",
            SeriesSpec::from_expr(vec![zero], "1/z", 1, "log")?,
            Arc::new(parse_expr("-log(1 - z)")?),
            "a_n = 1/n for n >= 1, phi = 1/zeta, F = -log(1 - z)",
        ),
        entry(
            "dilog",
            SeriesSpec::from_expr(vec![zero], "1/(z*z)", 1, "dilog")?,
            Arc::new(Dilog),
            "a_n = 1/n^2 for n >= 1, phi = 1/zeta^2, F = Li_2(z)",
        ),
        entry(
            "expneg",
            SeriesSpec::new(vec![one], expneg_phi, 0, "expneg")?,
            Arc::new(parse_expr("exp(-z)")?),
            "a_n = (-1)^n/n!, phi = interpolant of g = exp(-zeta), F = exp(-z)",
        ),
    ];
    for e in &entries {
        e.check_consistency(1e-10)?;
    }
    Ok(entries)
}

/// The built-in examples, checked against their closed forms on first use.
pub fn builtin_registry() -> Result<&'static [ExampleEntry]> {
    static REGISTRY: OnceLock<Result<Vec<ExampleEntry>>> = OnceLock::new();
    match REGISTRY.get_or_init(build_registry) {
        Ok(v) => Ok(v),
        Err(e) => Err(e.clone()),
    }
}

pub fn lookup(label: &str) -> Result<&'static ExampleEntry> {
    let reg = builtin_registry()?;
    reg.iter().find(|e| e.label == label).ok_or_else(|| {
        let known: Vec<&str> = reg.iter().map(|e| e.label.as_str()).collect();
        Error::Parameter(format!("unknown series '{label}'; known: {}", known.join(", ")))
    })
}
