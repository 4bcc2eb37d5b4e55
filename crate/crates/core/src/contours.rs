//! Integration paths built from rays, circular arcs and segments.
//!
//! Rays are parameterized by distance from the origin and arcs by angle, so
//! quadrature nodes are uniform in the natural variable. The angle handed to
//! integrands is the unreduced parameter value, which lets branch-aware
//! integrands read `Log` directly off the parameterization instead of
//! re-deriving it from a rounded point. Rays to infinity are cut off at a
//! truncation radius supplied when integrating.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadConfig, QuadResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayDirection {
    Outward,
    Inward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContourPiece {
    Ray {
        r_start: f64,
        theta: f64,
        direction: RayDirection,
    },
    Arc {
        radius: f64,
        theta_from: f64,
        theta_to: f64,
        orientation: Orientation,
    },
    Segment {
        from: Complex64,
        to: Complex64,
    },
}

/// A sampled point of a piece: position, oriented derivative with respect to
/// the natural parameter, and polar coordinates with the unreduced angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPoint {
    pub z: Complex64,
    pub dz: Complex64,
    pub polar: Option<(f64, f64)>,
}

impl ContourPiece {
    pub fn ray(r_start: f64, theta: f64, direction: RayDirection) -> Result<Self> {
        if !(r_start > 0.0) || !theta.is_finite() {
            return Err(Error::Parameter(format!(
                "ray needs r_start > 0 and finite angle, got r_start={r_start}, theta={theta}"
            )));
        }
        Ok(ContourPiece::Ray {
            r_start,
            theta,
            direction,
        })
    }

    pub fn arc(radius: f64, theta_from: f64, theta_to: f64) -> Result<Self> {
        if !(radius > 0.0) || theta_from == theta_to || !theta_from.is_finite() || !theta_to.is_finite() {
            return Err(Error::Parameter(format!(
                "arc needs radius > 0 and distinct finite angles, got {radius}, {theta_from}, {theta_to}"
            )));
        }
        let orientation = if theta_to > theta_from {
            Orientation::Ccw
        } else {
            Orientation::Cw
        };
        Ok(ContourPiece::Arc {
            radius,
            theta_from,
            theta_to,
            orientation,
        })
    }

    pub fn segment(from: Complex64, to: Complex64) -> Result<Self> {
        if from == to {
            return Err(Error::Parameter("degenerate segment".into()));
        }
        Ok(ContourPiece::Segment { from, to })
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, ContourPiece::Ray { .. })
    }

    /// Range of the natural parameter, increasing.
    pub fn param_range(&self, truncation: Option<f64>) -> Result<(f64, f64)> {
        match *self {
            ContourPiece::Ray { r_start, .. } => {
                let end = truncation.ok_or_else(|| {
                    Error::Parameter("ray integration needs a truncation radius".into())
                })?;
                if !(end > r_start) {
                    return Err(Error::Parameter(format!(
                        "truncation radius {end} does not exceed ray start {r_start}"
                    )));
                }
                Ok((r_start, end))
            }
            ContourPiece::Arc {
                theta_from,
                theta_to,
                ..
            } => Ok((theta_from.min(theta_to), theta_from.max(theta_to))),
            ContourPiece::Segment { .. } => Ok((0.0, 1.0)),
        }
    }

    /// Point at natural parameter `t`, with `dz` carrying the orientation sign.
    pub fn sample(&self, t: f64) -> ContourPoint {
        match *self {
            ContourPiece::Ray {
                theta, direction, ..
            } => {
                let unit = Complex64::from_polar(1.0, theta);
                let sign = match direction {
                    RayDirection::Outward => 1.0,
                    RayDirection::Inward => -1.0,
                };
                ContourPoint {
                    z: unit * t,
                    dz: unit * sign,
                    polar: Some((t, theta)),
                }
            }
            ContourPiece::Arc {
                radius,
                orientation,
                ..
            } => {
                let z = Complex64::from_polar(radius, t);
                let sign = match orientation {
                    Orientation::Ccw => 1.0,
                    Orientation::Cw => -1.0,
                };
                ContourPoint {
                    z,
                    dz: Complex64::i() * z * sign,
                    polar: Some((radius, t)),
                }
            }
            ContourPiece::Segment { from, to } => ContourPoint {
                z: from + (to - from) * t,
                dz: to - from,
                polar: None,
            },
        }
    }

    /// Start and end point in the direction of travel.
    pub fn endpoints(&self, truncation: Option<f64>) -> Result<(Complex64, Complex64)> {
        Ok(match *self {
            ContourPiece::Ray {
                r_start,
                theta,
                direction,
            } => {
                let near = Complex64::from_polar(r_start, theta);
                let far = truncation.map_or(Complex64::new(f64::INFINITY, f64::INFINITY), |r| {
                    Complex64::from_polar(r, theta)
                });
                match direction {
                    RayDirection::Outward => (near, far),
                    RayDirection::Inward => (far, near),
                }
            }
            ContourPiece::Arc {
                radius,
                theta_from,
                theta_to,
                ..
            } => (
                Complex64::from_polar(radius, theta_from),
                Complex64::from_polar(radius, theta_to),
            ),
            ContourPiece::Segment { from, to } => (from, to),
        })
    }

    fn breakpoints(&self, truncation: Option<f64>) -> Result<Vec<f64>> {
        let (a, b) = self.param_range(truncation)?;
        Ok(match self {
            ContourPiece::Ray { .. } => quadrature::geometric_breakpoints(a, b),
            ContourPiece::Arc { .. } => {
                let n = ((b - a) / (PI / 4.0)).ceil().max(1.0) as usize;
                (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
            }
            ContourPiece::Segment { .. } => vec![0.0, 1.0],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub pieces: Vec<ContourPiece>,
    pub label: String,
}

impl Contour {
    pub fn new(pieces: Vec<ContourPiece>, label: impl Into<String>) -> Self {
        Contour {
            pieces,
            label: label.into(),
        }
    }

    /// Integrate `f(point) dz` along the contour. `cfg.max_intervals` is the
    /// budget per piece.
    pub fn integrate<F>(&self, f: F, truncation: Option<f64>, cfg: &QuadConfig) -> Result<QuadResult>
    where
        F: Fn(&ContourPoint) -> Result<Complex64>,
    {
        let mut segments = Vec::new();
        for (k, piece) in self.pieces.iter().enumerate() {
            let b = piece.breakpoints(truncation)?;
            segments.extend(b.windows(2).map(|w| (k, w[0], w[1])));
        }
        let budget = QuadConfig {
            max_intervals: cfg.max_intervals * self.pieces.len().max(1),
            ..*cfg
        };
        quadrature::integrate(
            |k, t| {
                let p = self.pieces[k].sample(t);
                Ok(f(&p)? * p.dz)
            },
            &segments,
            &budget,
        )
    }

    /// Consecutive pieces must meet to within `1e-12` (relative to their size).
    pub fn check_continuity(&self, truncation: Option<f64>) -> Result<()> {
        for (k, pair) in self.pieces.windows(2).enumerate() {
            let (_, end) = pair[0].endpoints(truncation)?;
            let (start, _) = pair[1].endpoints(truncation)?;
            let scale = end.norm().max(1.0);
            if (end - start).norm() > 1e-12 * scale {
                return Err(Error::Parameter(format!(
                    "contour '{}' pieces {k} and {} do not meet: {end} vs {start}",
                    self.label,
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// Winding number about `probe`, by accumulating argument increments.
    ///
    /// A contour that starts with an inward ray and ends with an outward ray
    /// is closed by a counter-clockwise arc at the truncation radius.
    pub fn winding_number(&self, probe: Complex64, truncation: Option<f64>) -> Result<f64> {
        let mut pieces = self.pieces.clone();
        if let (
            Some(ContourPiece::Ray {
                theta: first,
                direction: RayDirection::Inward,
                ..
            }),
            Some(ContourPiece::Ray {
                theta: last,
                direction: RayDirection::Outward,
                ..
            }),
        ) = (pieces.first().copied(), pieces.last().copied())
        {
            let r = truncation.ok_or_else(|| {
                Error::Parameter("closing an unbounded contour needs a truncation radius".into())
            })?;
            let mut to = first;
            while to <= last {
                to += TAU;
            }
            pieces.push(ContourPiece::arc(r, last, to)?);
        }
        let mut total = 0.0;
        for piece in &pieces {
            let (a, b) = piece.param_range(truncation)?;
            let forward = match piece {
                ContourPiece::Ray { direction, .. } => *direction == RayDirection::Outward,
                ContourPiece::Arc { orientation, .. } => *orientation == Orientation::Ccw,
                ContourPiece::Segment { .. } => true,
            };
            let n = 20_000;
            let point = |k: usize| {
                let s = k as f64 / n as f64;
                let t = if forward { a + (b - a) * s } else { b - (b - a) * s };
                piece.sample(t).z - probe
            };
            let mut prev = point(0);
            for k in 1..=n {
                let next = point(k);
                total += (next / prev).arg();
                prev = next;
            }
        }
        Ok(total / TAU)
    }
}

/// Boundary of `{|arg z| <= theta} \ D(0, m + 1/2)`, positively oriented
/// with respect to that unbounded region: inward ray at `+theta`, clockwise
/// arc of radius `m + 1/2`, outward ray at `-theta`.
pub fn gamma_m_contour(m: u32, theta: f64) -> Result<Contour> {
    if m < 1 {
        return Err(Error::Parameter("split index m must be >= 1".into()));
    }
    sector_boundary(m as f64 + 0.5, theta, format!("Gamma_{m}"))
}

/// As [`gamma_m_contour`] but admitting `m = 0` (arc radius 1/2), which the
/// continuation engine uses when the interpolant is holomorphic there.
pub(crate) fn sector_boundary(radius: f64, theta: f64, label: String) -> Result<Contour> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::Parameter(format!(
            "sector half-angle {theta} outside (0, pi/2)"
        )));
    }
    Ok(Contour::new(
        vec![
            ContourPiece::ray(radius, theta, RayDirection::Inward)?,
            ContourPiece::arc(radius, theta, -theta)?,
            ContourPiece::ray(radius, -theta, RayDirection::Outward)?,
        ],
        label,
    ))
}

/// The boundary of `(C \ {|arg z| <= delta}) u rD`, negatively oriented:
/// inward ray at `+delta`, clockwise arc of `rT` from `delta` to `-delta`,
/// outward ray at `-delta`.
pub fn deformed_boundary(r: f64, delta: f64) -> Result<Contour> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!("radius {r} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::Parameter(format!("delta {delta} outside (0, pi)")));
    }
    Ok(Contour::new(
        vec![
            ContourPiece::ray(r, delta, RayDirection::Inward)?,
            ContourPiece::arc(r, delta, -delta)?,
            ContourPiece::ray(r, -delta, RayDirection::Outward)?,
        ],
        "deformed_boundary",
    ))
}

/// The two paths of the Mellin-type interpolant: the inward ray at `theta`
/// followed by the full positive circle `rT` starting at `r e^{i theta}`, and
/// the outward ray at `theta`.
pub fn interpolant_contour(r: f64, theta: f64) -> Result<(Contour, Contour)> {
    if !(r > 0.0) {
        return Err(Error::Parameter(format!("radius {r} must be positive")));
    }
    if !(-PI..PI).contains(&theta) {
        return Err(Error::Parameter(format!("theta {theta} outside [-pi, pi)")));
    }
    let first = Contour::new(
        vec![
            ContourPiece::ray(r, theta, RayDirection::Inward)?,
            ContourPiece::arc(r, theta, theta + TAU)?,
        ],
        "inward_ray_and_circle",
    );
    let second = Contour::new(
        vec![ContourPiece::ray(r, theta, RayDirection::Outward)?],
        "outward_ray",
    );
    Ok((first, second))
}
