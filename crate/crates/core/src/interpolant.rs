//! Entire coefficient interpolants built from a function `g` that decays
//! along a ray.
//!
//! For `g` holomorphic near the closed disc `rD` and along the ray at angle
//! `theta`, with `|g(t e^{i theta})| <= M exp(-t^eta)`,
//!
//! ```text
//! phi(z) = (1/2 pi i) [ int_{ray in + rT} alpha  +  int_{ray out} e^{-2 pi i z} alpha ]
//! alpha(zeta) = exp((-z - 1) Log_theta zeta) g(zeta)
//! ```
//!
//! is entire, and `phi(n)` is the `n`-th Laurent coefficient of `g` at the
//! origin. Since the inward and outward rays carry the same `alpha`, the two
//! ray integrals collapse into `(e^{-2 pi i z} - 1) A` with `A` the outward
//! ray integral.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contours::{deformed_boundary, interpolant_contour, Contour, ContourPoint};
use crate::error::{Error, Result};
use crate::function::{ComplexFunction, SharedFunction};
use crate::quadrature::QuadConfig;

/// Witnessed bound `|g(t e^{i theta_ray})| <= M exp(-t^eta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    #[serde(rename = "M")]
    pub m_bound: f64,
    pub eta: f64,
    pub theta_ray: f64,
    pub checked_radii: Vec<f64>,
}

impl DecayCertificate {
    pub fn new(m_bound: f64, eta: f64, theta_ray: f64) -> Result<Self> {
        if !(m_bound > 0.0) || !m_bound.is_finite() {
            return Err(Error::Parameter(format!("M = {m_bound} must be positive")));
        }
        if !(eta > 0.0 && eta < 0.5) {
            return Err(Error::Parameter(format!("eta = {eta} outside (0, 1/2)")));
        }
        if !(-PI..PI).contains(&theta_ray) {
            return Err(Error::Parameter(format!("ray angle {theta_ray} outside [-pi, pi)")));
        }
        Ok(DecayCertificate {
            m_bound,
            eta,
            theta_ray,
            checked_radii: Vec::new(),
        })
    }

    /// `log(M exp(-t^eta))`.
    pub fn log_bound(&self, t: f64) -> f64 {
        self.m_bound.ln() - t.powf(self.eta)
    }

    fn check_at(&self, g: &dyn ComplexFunction, angle: f64, t: f64) -> Result<()> {
        let value = g.log_abs(Complex64::from_polar(t, angle))?;
        if value > self.log_bound(t) + 1e-12 {
            return Err(Error::Certificate(format!(
                "|g| = exp({value:.6}) exceeds M exp(-t^eta) = exp({:.6}) at t = {t}, angle {angle}",
                self.log_bound(t)
            )));
        }
        Ok(())
    }

    /// Check the bound at the given radii along the certificate's ray and
    /// record them.
    pub fn verify(mut self, g: &dyn ComplexFunction, radii: &[f64]) -> Result<Self> {
        for &t in radii {
            self.check_at(g, self.theta_ray, t)?;
            self.checked_radii.push(t);
        }
        Ok(self)
    }

    /// Check the bound on a geometric set of radii in `[start, end]`.
    pub fn verify_span(self, g: &dyn ComplexFunction, start: f64, end: f64) -> Result<Self> {
        let radii = geometric_radii(start, end, 48);
        self.verify(g, &radii)
    }
}

fn geometric_radii(start: f64, end: f64, count: usize) -> Vec<f64> {
    let ratio = (end / start).powf(1.0 / (count - 1) as f64);
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolantConfig {
    pub r: f64,
    pub theta: f64,
    /// Relative quadrature tolerance; the ray truncation targets it as an
    /// absolute bound.
    pub quad_tol: f64,
    /// Explicit ray cut-off; chosen from the certificate when absent.
    pub ray_truncation: Option<f64>,
    /// Enlarge the circle for large `|z|`: to `|z|` when `g` is entire and
    /// `Re z > -1` (the circle then passes the saddle of the integrand), to
    /// `0.9` when `g` is not entire and `|Re z| > 20`.
    pub auto_radius: bool,
    pub max_intervals: usize,
}

impl InterpolantConfig {
    pub fn new(r: f64, theta: f64) -> Self {
        InterpolantConfig {
            r,
            theta,
            quad_tol: 1e-12,
            ray_truncation: None,
            auto_radius: false,
            max_intervals: 10_000,
        }
    }

    pub fn with_auto_radius(mut self) -> Self {
        self.auto_radius = true;
        self
    }

    fn effective_radius(&self, entire: bool, z: Complex64) -> f64 {
        if !self.auto_radius {
            self.r
        } else if entire {
            if z.re > -1.0 {
                self.r.max(z.norm())
            } else {
                self.r
            }
        } else if z.re.abs() > 20.0 {
            self.r.max(0.9)
        } else {
            self.r
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolantValue {
    pub value: Complex64,
    pub error: f64,
    pub radius: f64,
    pub truncation: f64,
}

/// Smallest doubling `T >= start` with
/// `M exp(-T^eta) T^{|Re z| + 1} exp(angle_span |Im z|) < tol`.
fn certified_truncation(cert: &DecayCertificate, z: Complex64, angle_span: f64, tol: f64, start: f64) -> Result<f64> {
    let log_tol = tol.ln();
    let excess = |t: f64| cert.log_bound(t) + (z.re.abs() + 1.0) * t.ln() + angle_span * z.im.abs();
    let mut t = start.max(2.0);
    while excess(t) >= log_tol {
        t *= 2.0;
        if t > 1e30 {
            return Err(Error::Configuration(format!(
                "no ray truncation below 1e30 meets tolerance {tol:e} for z = {z}"
            )));
        }
    }
    Ok(t)
}

fn radius_admissible(g: &dyn ComplexFunction, r: f64) -> Result<()> {
    if !(r > 0.0) || (!g.is_entire() && r >= 1.0) {
        return Err(Error::Parameter(format!(
            "radius {r} must lie in (0, 1) unless g is entire (then any r > 0)"
        )));
    }
    Ok(())
}

fn integrate_alpha(
    contour: &Contour,
    g: &dyn ComplexFunction,
    z: Complex64,
    truncation: Option<f64>,
    quad: &QuadConfig,
) -> Result<(Complex64, f64)> {
    let exponent = -z - 1.0;
    let alpha = |p: &ContourPoint| {
        let (rho, angle) = p.polar.expect("rays and arcs carry polar coordinates");
        let log = Complex64::new(rho.ln(), angle);
        Ok((exponent * log).exp() * g.eval(p.z)?)
    };
    let res = contour.integrate(alpha, truncation, quad)?;
    Ok((res.value, res.error))
}

/// Evaluate the interpolant `phi_{r, theta}(z)`.
pub fn phi_interpolant(
    g: &dyn ComplexFunction,
    cert: &DecayCertificate,
    cfg: &InterpolantConfig,
    z: Complex64,
) -> Result<InterpolantValue> {
    if cfg.theta != cert.theta_ray {
        return Err(Error::Parameter(format!(
            "configuration angle {} differs from the certified ray {}",
            cfg.theta, cert.theta_ray
        )));
    }
    let r = cfg.effective_radius(g.is_entire(), z);
    radius_admissible(g, r)?;
    let span = cfg.theta.abs() + TAU;
    let needed = certified_truncation(cert, z, span, cfg.quad_tol, 2.0 * r)?;
    let truncation = match cfg.ray_truncation {
        Some(t) if t < needed => {
            return Err(Error::Parameter(format!(
                "ray truncation {t} is below the certified cut-off {needed}"
            )))
        }
        Some(t) => t,
        None => needed,
    };
    cert.check_at(g, cert.theta_ray, truncation)?;

    let (first, outward) = interpolant_contour(r, cfg.theta)?;
    let circle = Contour::new(vec![first.pieces[1]], "circle");
    let quad = QuadConfig {
        abs_tol: 1e-15,
        rel_tol: cfg.quad_tol,
        max_intervals: cfg.max_intervals,
    };
    let (c_val, c_err) = integrate_alpha(&circle, g, z, None, &quad)?;
    let factor = expm1(Complex64::new(0.0, -TAU) * z);
    let (a_val, a_err) = if factor == Complex64::new(0.0, 0.0) {
        (Complex64::new(0.0, 0.0), 0.0)
    } else {
        integrate_alpha(&outward, g, z, Some(truncation), &quad)?
    };
    let (ray_term, ray_err) = if factor.re.is_finite() && factor.im.is_finite() {
        (factor * a_val, factor.norm() * a_err)
    } else {
        // e^{-2 pi i z} overflows while A is tiny: multiply in the log domain.
        let w = Complex64::new(TAU * z.im, -TAU * (z.re - z.re.round()));
        let term = if a_val == Complex64::new(0.0, 0.0) {
            a_val
        } else {
            (w + a_val.ln()).exp() - a_val
        };
        (term, (w.re + a_err.ln()).exp() + a_err)
    };
    let scale = Complex64::new(0.0, TAU).inv();
    Ok(InterpolantValue {
        value: (c_val + ray_term) * scale,
        error: (c_err + ray_err) / TAU,
        radius: r,
        truncation,
    })
}

/// `e^w - 1` accurate near `w = 0`; exactly zero for `w = -2 pi i k`.
fn expm1(w: Complex64) -> Complex64 {
    // e^{-2 pi i z} - 1 vanishes at integers; reduce the imaginary part.
    let turns = (w.im / TAU).round();
    let im = w.im - turns * TAU;
    let half = (0.5 * im).sin();
    Complex64::new(w.re.exp_m1() * im.cos() - 2.0 * half * half, w.re.exp() * im.sin())
}

/// Largest pairwise difference of `phi_{r, theta}(z)` over `r_list`.
pub fn check_r_independence(
    g: &dyn ComplexFunction,
    cert: &DecayCertificate,
    theta: f64,
    z: Complex64,
    r_list: &[f64],
    quad_tol: f64,
) -> Result<f64> {
    let values = r_list
        .iter()
        .map(|&r| {
            let cfg = InterpolantConfig {
                quad_tol,
                ..InterpolantConfig::new(r, theta)
            };
            Ok(phi_interpolant(g, cert, &cfg, z)?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// The interpolant of `f` (holomorphic off `[1, inf)`, decaying outside the
/// sector `|arg| < delta`) as `-(1/2 pi i)` times the integral over the
/// negatively oriented boundary of `{|arg| < delta} u e^{-delta} D`.
///
/// `cert` bounds `f` on both rays at angles `+-delta`.
pub fn phi_deformed(
    f: &dyn ComplexFunction,
    cert: &DecayCertificate,
    delta: f64,
    z: Complex64,
    quad_tol: f64,
) -> Result<InterpolantValue> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::Parameter(format!("delta {delta} outside (0, pi)")));
    }
    let r = (-delta).exp();
    let contour = deformed_boundary(r, delta)?;
    let truncation = certified_truncation(cert, z, delta, quad_tol, 2.0)?;
    for angle in [delta, -delta] {
        for t in geometric_radii(r, truncation, 32) {
            cert.check_at(f, angle, t)?;
        }
    }
    let quad = QuadConfig {
        abs_tol: 1e-15,
        rel_tol: quad_tol,
        max_intervals: 10_000,
    };
    let (value, error) = integrate_alpha(&contour, f, z, Some(truncation), &quad)?;
    Ok(InterpolantValue {
        value: -value / Complex64::new(0.0, TAU),
        error: error / TAU,
        radius: r,
        truncation,
    })
}

/// Stirling upper bound `sqrt(2 pi / t) (t/e)^t e^{1/(12 t)}` for `Gamma(t)`,
/// `t = x / eta`.
pub fn stirling_gamma_bound(x: f64, eta: f64) -> Result<f64> {
    Ok(log_stirling_gamma_bound(x, eta)?.exp())
}

pub fn log_stirling_gamma_bound(x: f64, eta: f64) -> Result<f64> {
    if !(x >= 1.0) || !(eta > 0.0) {
        return Err(Error::Parameter(format!("need x >= 1 and eta > 0, got {x}, {eta}")));
    }
    let t = x / eta;
    Ok(0.5 * (TAU / t).ln() + t * (t.ln() - 1.0) + 1.0 / (12.0 * t))
}

/// A numerically evaluated interpolant usable as a [`ComplexFunction`].
///
/// Several certificates on different rays may be supplied; for `Im z > 0`
/// the lowest ray angle is used and for `Im z < 0` the highest, which keeps
/// the integrand no larger than the result. With a single certificate the
/// ray is fixed.
pub struct NumericInterpolant {
    g: SharedFunction,
    certs: Vec<DecayCertificate>,
    base: InterpolantConfig,
    label: String,
}

impl NumericInterpolant {
    pub fn new(g: SharedFunction, mut certs: Vec<DecayCertificate>, base: InterpolantConfig) -> Result<Self> {
        if certs.is_empty() {
            return Err(Error::Parameter("at least one decay certificate is needed".into()));
        }
        certs.sort_by(|a, b| a.theta_ray.total_cmp(&b.theta_ray));
        let label = format!("interpolant[{}]", g.describe());
        Ok(NumericInterpolant { g, certs, base, label })
    }

    fn certificate_for(&self, z: Complex64) -> &DecayCertificate {
        if z.im > 0.0 {
            &self.certs[0]
        } else if z.im < 0.0 {
            &self.certs[self.certs.len() - 1]
        } else {
            self.certs
                .iter()
                .min_by(|a, b| a.theta_ray.abs().total_cmp(&b.theta_ray.abs()))
                .expect("non-empty")
        }
    }

    pub fn evaluate(&self, z: Complex64) -> Result<InterpolantValue> {
        let cert = self.certificate_for(z);
        let cfg = InterpolantConfig {
            theta: cert.theta_ray,
            ..self.base
        };
        phi_interpolant(&*self.g, cert, &cfg, z)
    }
}

impl ComplexFunction for NumericInterpolant {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.evaluate(z)?.value)
    }

    fn is_entire(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// The interpolant of `e^{-zeta}` with rays at `0` and `+-1.3`, all
/// certified with `M = e`, `eta = 0.4`.
pub fn exp_neg_interpolant() -> Result<NumericInterpolant> {
    let g: SharedFunction = Arc::new(crate::expr::parse_expr("exp(-z)")?);
    let certs = [-1.3, 0.0, 1.3]
        .into_iter()
        .map(|theta| DecayCertificate::new(std::f64::consts::E, 0.4, theta)?.verify_span(&*g, 1e-3, 1e6))
        .collect::<Result<Vec<_>>>()?;
    let base = InterpolantConfig::new(0.5, 0.0).with_auto_radius();
    NumericInterpolant::new(g, certs, base)
}
