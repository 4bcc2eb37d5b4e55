//! Continuation of `sum a_n z^n` to `C \ [1, inf)` as a head sum plus the
//! contour integral of the kernel over the boundary of a truncated sector.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contours::sector_boundary;
use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::function::{ComplexFunction, SharedFunction};
use crate::kernel::{default_constants, kernel_g, point_constants, truncation_radius};
use crate::quadrature::QuadConfig;

/// Compensated (Neumaier) summation of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: Complex64,
    compensation: Complex64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: Complex64) {
        let (s, c) = two_sum(self.sum.re, x.re);
        let (t, d) = two_sum(self.sum.im, x.im);
        self.sum = Complex64::new(s, t);
        self.compensation += Complex64::new(c, d);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.compensation
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, err)
}

/// A power series given by explicit leading coefficients and an interpolant
/// `phi` with `phi(n) = a_n` for `n >= n0`.
#[derive(Clone)]
pub struct SeriesSpec {
    head: Vec<Complex64>,
    phi: SharedFunction,
    phi_source: Option<String>,
    n0: usize,
    label: String,
}

impl std::fmt::Debug for SeriesSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeriesSpec")
            .field("label", &self.label)
            .field("head", &self.head)
            .field("phi", &self.phi.describe())
            .field("n0", &self.n0)
            .finish()
    }
}

/// JSON form of a [`SeriesSpec`]: `{"head": [[re, im], ...], "phi": "<expr>", "n0": int, "label": str}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpecJson {
    pub head: Vec<[f64; 2]>,
    pub phi: String,
    pub n0: usize,
    #[serde(default)]
    pub label: String,
}

impl SeriesSpec {
    pub fn new(
        head: Vec<Complex64>,
        phi: SharedFunction,
        n0: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n0 > head.len() {
            return Err(Error::Spec(format!(
                "n0 = {n0} exceeds the {} head coefficients",
                head.len()
            )));
        }
        for (n, a) in head.iter().enumerate().skip(n0) {
            let p = phi.eval(Complex64::new(n as f64, 0.0))?;
            if (p - a).norm() >= 1e-10 {
                return Err(Error::Spec(format!(
                    "phi({n}) = {p} disagrees with head coefficient {a}"
                )));
            }
        }
        Ok(SeriesSpec {
            head,
            phi,
            phi_source: None,
            n0,
            label: label.into(),
        })
    }

    pub fn from_expr(head: Vec<Complex64>, phi: &str, n0: usize, label: impl Into<String>) -> Result<Self> {
        let expr = parse_expr(phi)?;
        let source = expr.render();
        let mut spec = SeriesSpec::new(head, Arc::new(expr), n0, label)?;
        spec.phi_source = Some(source);
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: SeriesSpecJson =
            serde_json::from_str(text).map_err(|e| Error::Spec(format!("malformed JSON: {e}")))?;
        SeriesSpec::try_from(dto)
    }

    /// The JSON form; `None` when the interpolant has no expression source.
    pub fn to_json(&self) -> Option<SeriesSpecJson> {
        Some(SeriesSpecJson {
            head: self.head.iter().map(|a| [a.re, a.im]).collect(),
            phi: self.phi_source.clone()?,
            n0: self.n0,
            label: self.label.clone(),
        })
    }

    pub fn head(&self) -> &[Complex64] {
        &self.head
    }

    pub fn phi(&self) -> &dyn ComplexFunction {
        &*self.phi
    }

    pub fn shared_phi(&self) -> SharedFunction {
        self.phi.clone()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `a_n`: the head coefficient where given, `phi(n)` beyond.
    pub fn coefficient(&self, n: usize) -> Result<Complex64> {
        match self.head.get(n) {
            Some(a) => Ok(*a),
            None => self.phi.eval(Complex64::new(n as f64, 0.0)),
        }
    }

    /// `sum_{n <= m} a_n z^n`.
    pub fn head_sum(&self, z: Complex64, m: usize) -> Result<Complex64> {
        let mut acc = NeumaierSum::default();
        let mut power = Complex64::new(1.0, 0.0);
        for n in 0..=m {
            acc.add(self.coefficient(n)? * power);
            power *= z;
        }
        Ok(acc.value())
    }
}

impl TryFrom<SeriesSpecJson> for SeriesSpec {
    type Error = Error;

    fn try_from(dto: SeriesSpecJson) -> Result<Self> {
        let head = dto.head.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        SeriesSpec::from_expr(head, &dto.phi, dto.n0, dto.label)
    }
}

/// The constants `a = min (pi - |Arg z - pi|)` and `b = max log|z|` over a set
/// of target points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactParams {
    pub a: f64,
    pub b: f64,
}

impl CompactParams {
    pub fn for_point(z: Complex64) -> Result<Self> {
        let (a, b) = point_constants(z)?;
        Ok(CompactParams { a, b })
    }

    pub fn for_points(points: &[Complex64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("no target points".into()));
        }
        let mut params = CompactParams {
            a: f64::INFINITY,
            b: f64::NEG_INFINITY,
        };
        for z in points {
            let p = CompactParams::for_point(*z)?;
            params.a = params.a.min(p.a);
            params.b = params.b.max(p.b);
        }
        Ok(params)
    }
}

/// Sector half-angle with `b cot theta - a <= -a/2`: `pi/4` when that already
/// suffices, otherwise the smallest angle meeting the margin.
pub fn select_theta(params: &CompactParams) -> Result<f64> {
    if !(params.a > 0.0) {
        return Err(Error::Branch(format!(
            "a = {} is not positive: the target touches [0, inf)",
            params.a
        )));
    }
    if params.b <= 0.0 {
        return Ok(FRAC_PI_4);
    }
    Ok((2.0 * params.b / params.a).atan().max(FRAC_PI_4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    /// Split index: the head runs to `a_m`, the contour arc has radius `m + 1/2`.
    pub m: usize,
    pub theta: f64,
    /// Relative quadrature tolerance.
    pub quad_tol: f64,
    /// Absolute bound on the discarded ray tails.
    pub trunc_tol: f64,
    /// Subdivision budget per contour piece.
    pub max_intervals: usize,
}

impl ContinuationConfig {
    pub const DEFAULT_QUAD_TOL: f64 = 1e-11;
    pub const DEFAULT_TRUNC_TOL: f64 = 1e-14;

    /// Configuration chosen from the target point: `theta` from
    /// [`select_theta`], `m = max(n0, 8)` inside the unit disc and `m = n0`
    /// outside it (a long head would cancel against the tail there), raised
    /// until the interpolant's known singularities lie off the sector.
    pub fn auto(spec: &SeriesSpec, z: Complex64) -> Result<Self> {
        let params = CompactParams::for_point(z)?;
        // On (0, 1) the rays decay for every angle.
        let theta = if params.a == 0.0 { FRAC_PI_4 } else { select_theta(&params)? };
        let base = if z.norm() <= 1.0 { spec.n0.max(8) } else { spec.n0 };
        let m = clear_singularities(spec.phi(), base, theta)?;
        Ok(ContinuationConfig {
            m,
            theta,
            quad_tol: Self::DEFAULT_QUAD_TOL,
            trunc_tol: Self::DEFAULT_TRUNC_TOL,
            max_intervals: 10_000,
        })
    }
}

fn in_sector_region(p: Complex64, radius: f64, theta: f64, margin: f64) -> bool {
    p.norm() > radius - margin && p.arg().abs() < theta + margin / p.norm().max(margin)
}

fn clear_singularities(phi: &dyn ComplexFunction, base: usize, theta: f64) -> Result<usize> {
    let mut m = base;
    for p in phi.poles().into_iter().chain(phi.cut_rays().into_iter().map(|c| c.origin)) {
        while in_sector_region(p, m as f64 + 0.5, theta, 0.25) {
            m += 1;
            if m > 100_000 {
                return Err(Error::Configuration(format!(
                    "singularity {p} of the interpolant cannot be cleared from the sector"
                )));
            }
        }
    }
    Ok(m)
}

fn check_holomorphic_on_sector(phi: &dyn ComplexFunction, m: usize, theta: f64) -> Result<()> {
    let radius = m as f64 + 0.5;
    for p in phi.poles() {
        if in_sector_region(p, radius, theta, 0.1) {
            return Err(Error::Configuration(format!(
                "interpolant pole {p} lies in the sector beyond radius {radius}; increase m"
            )));
        }
    }
    for cut in phi.cut_rays() {
        let dir = Complex64::from_polar(1.0, cut.angle);
        let hit = std::iter::once(0.0)
            .chain((0..80).map(|k| 1e-3 * 1.3f64.powi(k)))
            .map(|t| cut.origin + dir * t)
            .find(|p| in_sector_region(*p, radius, theta, 0.1));
        if let Some(p) = hit {
            return Err(Error::Configuration(format!(
                "branch cut of the interpolant passes through {p} inside the sector"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailResult {
    pub value: Complex64,
    /// Quadrature error estimate plus the truncation allowance.
    pub error: f64,
    pub truncation: f64,
    pub evaluations: usize,
}

/// `I_m(z) = int_{Gamma_m} g(zeta, z) dzeta`, which equals `sum_{n > m} phi(n) z^n`.
pub fn tail_integral(spec: &SeriesSpec, z: Complex64, cfg: &ContinuationConfig) -> Result<TailResult> {
    if cfg.m < spec.n0 {
        return Err(Error::Parameter(format!("m = {} is below n0 = {}", cfg.m, spec.n0)));
    }
    if !(cfg.quad_tol > 0.0 && cfg.trunc_tol > 0.0) {
        return Err(Error::Parameter("tolerances must be positive".into()));
    }
    let phi = spec.phi();
    let contour = sector_boundary(cfg.m as f64 + 0.5, cfg.theta, format!("Gamma_{}", cfg.m))?;
    check_holomorphic_on_sector(phi, cfg.m, cfg.theta)?;
    let radius = cfg.m as f64 + 0.5;
    let truncation = truncation_radius(z, cfg.theta, phi, default_constants(), cfg.trunc_tol)?.max(2.0 * radius);
    let quad = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: cfg.quad_tol,
        max_intervals: cfg.max_intervals,
    };
    let res = contour.integrate(|p| kernel_g(p.z, z, phi), Some(truncation), &quad)?;
    Ok(TailResult {
        value: res.value,
        error: res.error + 2.0 * cfg.trunc_tol,
        truncation,
        evaluations: res.evaluations,
    })
}

/// `sum_{n = m+1}^{N} phi(n) z^n`, the residue side of the tail identity.
pub fn residue_partial_sum(spec: &SeriesSpec, z: Complex64, m: usize, big_n: usize) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Precondition(format!("|z| = {} is not below 1", z.norm())));
    }
    let mut acc = NeumaierSum::default();
    let mut power = z.powi((m + 1) as i32);
    for n in m + 1..=big_n {
        acc.add(spec.phi().eval(Complex64::new(n as f64, 0.0))? * power);
        power *= z;
    }
    Ok(acc.value())
}

/// Direct summation of the series inside the unit disc until the terms are
/// negligible.
pub fn direct_sum(spec: &SeriesSpec, z: Complex64) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Precondition(format!("|z| = {} is not below 1", z.norm())));
    }
    let mut acc = NeumaierSum::default();
    let mut power = Complex64::new(1.0, 0.0);
    let mut quiet = 0;
    let start = spec.head.len().max(spec.n0);
    for n in 0..10_000_000usize {
        let term = spec.coefficient(n)? * power;
        acc.add(term);
        power *= z;
        if n >= start && term.norm() <= 1e-17 * acc.value().norm() {
            quiet += 1;
            if quiet >= 20 {
                return Ok(acc.value());
            }
        } else {
            quiet = 0;
        }
        if power.norm() == 0.0 && n >= start {
            return Ok(acc.value());
        }
    }
    Err(Error::Accuracy {
        estimate: acc.value(),
        error: f64::NAN,
        tolerance: 1e-17,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `z = 0`: the constant coefficient.
    Constant,
    /// Summation of the series inside the unit disc.
    DirectSum,
    /// Head sum plus tail integral.
    Contour,
    /// Head sum plus tail integral, confirmed against direct summation.
    CrossChecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Continued {
    pub value: Complex64,
    pub error: f64,
    pub method: Method,
    pub config: Option<ContinuationConfig>,
}

/// The analytic continuation of the series at `z in C \ [1, inf)`.
pub fn continue_at(spec: &SeriesSpec, z: Complex64, cfg: Option<&ContinuationConfig>) -> Result<Continued> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Parameter(format!("non-finite point {z}")));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::OutsideDomain { at: z });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Continued {
            value: spec.coefficient(0)?,
            error: 0.0,
            method: Method::Constant,
            config: None,
        });
    }
    if z.im == 0.0 && z.re > 0.0 {
        return Ok(Continued {
            value: direct_sum(spec, z)?,
            error: 1e-16,
            method: Method::DirectSum,
            config: None,
        });
    }
    let cfg = match cfg {
        Some(c) => *c,
        None => ContinuationConfig::auto(spec, z)?,
    };
    let tail = tail_integral(spec, z, &cfg)?;
    let head = spec.head_sum(z, cfg.m)?;
    let value = head + tail.value;
    let error = tail.error + 1e-16 * (head.norm() + tail.value.norm());
    if z.norm() < 1.0 {
        let direct = direct_sum(spec, z)?;
        let tolerance = 1e-6 * value.norm().max(1.0);
        if (direct - value).norm() > tolerance {
            return Err(Error::Accuracy {
                estimate: value,
                error: (direct - value).norm(),
                tolerance,
            });
        }
        return Ok(Continued {
            value,
            error: error.max((direct - value).norm()),
            method: Method::CrossChecked,
            config: Some(cfg),
        });
    }
    Ok(Continued {
        value,
        error,
        method: Method::Contour,
        config: Some(cfg),
    })
}

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

fn check(name: String, deviation: f64, tolerance: f64) -> InvariantCheck {
    InvariantCheck {
        name,
        passed: deviation < tolerance,
        deviation,
        tolerance,
    }
}

fn failure(name: String, err: &Error) -> InvariantCheck {
    InvariantCheck {
        name: format!("{name}: {err}"),
        passed: false,
        deviation: f64::NAN,
        tolerance: f64::NAN,
    }
}

/// Residue identity, split-index and angle independence, and the mean-value
/// property of the continued function.
pub fn verify_invariants(spec: &SeriesSpec) -> Vec<InvariantCheck> {
    let mut out = Vec::new();
    let c = Complex64::new;

    for z in [c(0.5, 0.0), c(-0.5, 0.0), c(0.3, 0.6)] {
        let m = spec.n0.max(5);
        let name = format!("residue identity z={z} m={m}");
        let result = (|| {
            let cfg = ContinuationConfig {
                m,
                theta: FRAC_PI_4,
                ..ContinuationConfig::auto(spec, z)?
            };
            let tail = tail_integral(spec, z, &cfg)?.value;
            let big_n = m + 1 + (40.0 / -z.norm().log10()).ceil() as usize;
            let sum = residue_partial_sum(spec, z, m, big_n)?;
            Ok::<_, Error>((tail - sum).norm())
        })();
        out.push(match result {
            Ok(dev) => check(name, dev, 1e-7),
            Err(e) => failure(name, &e),
        });
    }

    for z in [c(-2.0, 0.0), c(0.0, 1.5), c(-1.0, 1.0)] {
        let name = format!("m-independence z={z}");
        let result = (|| {
            let base = ContinuationConfig::auto(spec, z)?;
            let values = [5, 8, 12]
                .iter()
                .map(|dm| {
                    let cfg = ContinuationConfig { m: base.m.max(spec.n0) + dm - 5, ..base };
                    Ok(continue_at(spec, z, Some(&cfg))?.value)
                })
                .collect::<Result<Vec<_>>>()?;
            let scale = values[0].norm().max(1.0);
            Ok::<_, Error>(values.iter().map(|v| (v - values[0]).norm()).fold(0.0, f64::max) / scale)
        })();
        out.push(match result {
            Ok(dev) => check(name, dev, 1e-7),
            Err(e) => failure(name, &e),
        });

        let name = format!("theta-independence z={z}");
        let result = (|| {
            let base = ContinuationConfig::auto(spec, z)?;
            let other = ContinuationConfig {
                theta: 0.5 * (base.theta + FRAC_PI_2),
                ..base
            };
            let a = tail_integral(spec, z, &base)?.value;
            let b = tail_integral(spec, z, &other)?.value;
            Ok::<_, Error>((a - b).norm() / a.norm().max(1.0))
        })();
        out.push(match result {
            Ok(dev) => check(name, dev, 1e-7),
            Err(e) => failure(name, &e),
        });
    }

    let z0 = c(-1.5, 0.5);
    let name = format!("mean-value property around {z0}");
    let result = (|| {
        let center = continue_at(spec, z0, None)?.value;
        let n = 64;
        let values = (0..n)
            .into_par_iter()
            .map(|k| {
                let w = z0 + Complex64::from_polar(0.05, TAU * k as f64 / n as f64);
                Ok(continue_at(spec, w, None)?.value)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut acc = NeumaierSum::default();
        for v in values {
            acc.add(v);
        }
        Ok::<_, Error>((acc.value() / n as f64 - center).norm() / center.norm().max(1.0))
    })();
    out.push(match result {
        Ok(dev) => check(name, dev, 1e-6),
        Err(e) => failure(name, &e),
    });
    out
}
