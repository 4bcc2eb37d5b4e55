//! Finite-radius estimators of exponential type, inner exponential type, the
//! indicator function and the order of a function.
//!
//! Every `limsup` is replaced by a supremum over the largest radii of a
//! [`RadialSchedule`] (the top `tail_fraction` of it). The results are
//! estimates tied to the schedule, not certified bounds.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::ComplexFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Geometric,
    Linear,
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSchedule {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub tail_fraction: f64,
}

impl RadialSchedule {
    pub fn new(r_min: f64, r_max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        Self::with_tail(r_min, r_max, count, spacing, DEFAULT_TAIL_FRACTION)
    }

    pub fn geometric(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        Self::new(r_min, r_max, count, Spacing::Geometric)
    }

    pub fn with_tail(r_min: f64, r_max: f64, count: usize, spacing: Spacing, tail_fraction: f64) -> Result<Self> {
        let s = RadialSchedule {
            r_min,
            r_max,
            count,
            spacing,
            tail_fraction,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::Parameter(format!(
                "schedule needs 0 < r_min < r_max < inf, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if self.count < 2 {
            return Err(Error::Parameter(format!("schedule needs at least 2 radii, got {}", self.count)));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return Err(Error::Parameter(format!(
                "tail fraction {} outside (0, 1)",
                self.tail_fraction
            )));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    return self.r_max;
                }
                match self.spacing {
                    Spacing::Geometric => self.r_min * (self.r_max / self.r_min).powf(s),
                    Spacing::Linear => self.r_min + (self.r_max - self.r_min) * s,
                }
            })
            .collect()
    }

    /// The largest `ceil(tail_fraction * count)` radii (at least one).
    pub fn tail_radii(&self) -> Vec<f64> {
        let all = self.radii();
        let keep = ((self.tail_fraction * self.count as f64).ceil() as usize).clamp(1, self.count);
        all[self.count - keep..].to_vec()
    }
}

impl Default for RadialSchedule {
    fn default() -> Self {
        RadialSchedule {
            r_min: 1.0,
            r_max: 200.0,
            count: 64,
            spacing: Spacing::Geometric,
            tail_fraction: DEFAULT_TAIL_FRACTION,
        }
    }
}

/// `mesh + 1` equally spaced angles from `theta1` to `theta2`, inclusive.
pub fn sector_angles(theta1: f64, theta2: f64, mesh: usize) -> Result<Vec<f64>> {
    if mesh == 0 {
        return Err(Error::Parameter("angular mesh must be at least 1".into()));
    }
    if !(theta1 <= theta2) {
        return Err(Error::Parameter(format!("sector ({theta1}, {theta2}) is empty")));
    }
    Ok((0..=mesh)
        .map(|k| theta1 + (theta2 - theta1) * k as f64 / mesh as f64)
        .collect())
}

/// Maximum of `values`, ignoring `-inf` (zeros of the function). `-inf` when
/// nothing remains. Errors propagate in node order.
fn max_finite(values: Vec<Result<f64>>) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for v in values {
        let v = v?;
        if v.is_nan() {
            return Err(Error::Evaluation {
                at: Complex64::new(f64::NAN, f64::NAN),
                reason: "log-modulus is NaN".into(),
            });
        }
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

fn scaled_log_abs(f: &dyn ComplexFunction, r: f64, theta: f64) -> Result<f64> {
    let z = Complex64::from_polar(r, theta);
    let l = f.log_abs(z)?;
    if l.is_nan() {
        return Err(Error::eval(z, "log-modulus is NaN"));
    }
    Ok(l / r)
}

/// Supremum of `log|f(z)|/|z|` over the tail radii and the given angles,
/// without the clamp at zero.
fn sector_sup(f: &dyn ComplexFunction, angles: &[f64], sched: &RadialSchedule) -> Result<f64> {
    sched.validate()?;
    let nodes: Vec<(f64, f64)> = sched
        .tail_radii()
        .into_iter()
        .flat_map(|r| angles.iter().map(move |&t| (r, t)))
        .collect();
    let values: Vec<Result<f64>> = nodes.par_iter().map(|&(r, t)| scaled_log_abs(f, r, t)).collect();
    max_finite(values)
}

/// Estimate `ET` of `f` over the closed sector `theta1 <= arg z <= theta2`.
pub fn exp_type(f: &dyn ComplexFunction, sector: (f64, f64), sched: &RadialSchedule, angular_mesh: usize) -> Result<f64> {
    let angles = sector_angles(sector.0, sector.1, angular_mesh)?;
    Ok(sector_sup(f, &angles, sched)?.max(0.0))
}

/// `exp_type` on each shrunken sector `(theta1 + m, theta2 - m)` of the
/// margin ladder, in ladder order.
pub fn inner_exp_type_ladder(
    f: &dyn ComplexFunction,
    open_sector: (f64, f64),
    margins: &[f64],
    sched: &RadialSchedule,
    angular_mesh: usize,
) -> Result<Vec<(f64, f64)>> {
    let (t1, t2) = open_sector;
    if !(t1 < t2) {
        return Err(Error::Parameter(format!("sector ({t1}, {t2}) is empty")));
    }
    if margins.is_empty() {
        return Err(Error::Parameter("margin ladder is empty".into()));
    }
    for (k, &m) in margins.iter().enumerate() {
        if !(m > 0.0) {
            return Err(Error::Parameter(format!("margin {m} must be positive")));
        }
        if k > 0 && !(m < margins[k - 1]) {
            return Err(Error::Parameter("margins must be strictly decreasing".into()));
        }
        if m >= 0.5 * (t2 - t1) {
            return Err(Error::Parameter(format!(
                "margin {m} is at least half the sector opening {}",
                t2 - t1
            )));
        }
    }
    margins
        .iter()
        .map(|&m| Ok((m, exp_type(f, (t1 + m, t2 - m), sched, angular_mesh)?)))
        .collect()
}

/// Estimate `IET` of `f` over the open sector: the supremum of the ladder.
pub fn inner_exp_type(
    f: &dyn ComplexFunction,
    open_sector: (f64, f64),
    margins: &[f64],
    sched: &RadialSchedule,
    angular_mesh: usize,
) -> Result<f64> {
    let ladder = inner_exp_type_ladder(f, open_sector, margins, sched, angular_mesh)?;
    Ok(ladder.iter().map(|&(_, v)| v).fold(0.0, f64::max))
}

/// `(R, log|f(R e^{i theta})| / R)` over the whole schedule.
pub fn indicator_trace(f: &dyn ComplexFunction, theta: f64, sched: &RadialSchedule) -> Result<Vec<(f64, f64)>> {
    sched.validate()?;
    sched
        .radii()
        .par_iter()
        .map(|&r| Ok((r, scaled_log_abs(f, r, theta)?)))
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect()
}

/// Estimate the indicator `h_f(theta)`.
pub fn indicator(f: &dyn ComplexFunction, theta: f64, sched: &RadialSchedule) -> Result<f64> {
    sector_sup(f, &[theta], sched)
}

/// `log max_{|z| = r} |f(z)|` on `angular_mesh` equally spaced nodes.
pub fn log_max_modulus(f: &dyn ComplexFunction, r: f64, angular_mesh: usize) -> Result<f64> {
    if angular_mesh == 0 {
        return Err(Error::Parameter("angular mesh must be at least 1".into()));
    }
    let values: Vec<Result<f64>> = (0..angular_mesh)
        .into_par_iter()
        .map(|k| f.log_abs(Complex64::from_polar(r, TAU * k as f64 / angular_mesh as f64)))
        .collect();
    max_finite(values)
}

/// Estimate the order of an entire `f`.
///
/// Radii with `r <= 1` or `M(r) <= 1` are skipped; if none remain (a bounded
/// sample, e.g. a constant) the estimate is `0`.
pub fn order_estimate(f: &dyn ComplexFunction, sched: &RadialSchedule, angular_mesh: usize) -> Result<f64> {
    if !f.is_entire() {
        return Err(Error::Parameter(format!(
            "order is defined for entire functions; {} is not known to be entire",
            f.describe()
        )));
    }
    sched.validate()?;
    let mut best = f64::NEG_INFINITY;
    for r in sched.tail_radii() {
        if r <= 1.0 {
            continue;
        }
        let log_m = log_max_modulus(f, r, angular_mesh)?;
        if log_m > 0.0 {
            best = best.max(log_m.ln() / r.ln());
        }
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub function: String,
    pub sector: (f64, f64),
    pub et_estimate: f64,
    pub iet_estimate: f64,
    pub iet_ladder: Vec<(f64, f64)>,
    pub indicator_samples: Vec<(f64, f64)>,
    /// `None` when the function is not known to be entire.
    pub order_estimate: Option<f64>,
    pub schedule: RadialSchedule,
    pub tail_fraction: f64,
    pub angular_mesh: usize,
}

/// All four estimates for `f` over `sector`. Indicator angles are the
/// midpoints of `indicator_count` equal parts of the sector.
pub fn growth_report(
    f: &dyn ComplexFunction,
    sector: (f64, f64),
    margins: &[f64],
    sched: &RadialSchedule,
    angular_mesh: usize,
    indicator_count: usize,
) -> Result<GrowthReport> {
    let (t1, t2) = sector;
    let et = exp_type(f, sector, sched, angular_mesh)?;
    let ladder = inner_exp_type_ladder(f, sector, margins, sched, angular_mesh)?;
    let iet = ladder.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let n = indicator_count.max(1);
    let indicator_samples = (0..n)
        .map(|k| {
            let theta = t1 + (t2 - t1) * (k as f64 + 0.5) / n as f64;
            Ok((theta, indicator(f, theta, sched)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let order = if f.is_entire() {
        Some(order_estimate(f, sched, angular_mesh.max(8))?)
    } else {
        None
    };
    Ok(GrowthReport {
        function: f.describe(),
        sector,
        et_estimate: et,
        iet_estimate: iet,
        iet_ladder: ladder,
        indicator_samples,
        order_estimate: order,
        schedule: *sched,
        tail_fraction: sched.tail_fraction,
        angular_mesh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn sched() -> RadialSchedule {
        RadialSchedule::geometric(1.0, 200.0, 48).unwrap()
    }

    #[test]
    fn schedule_shapes() {
        let s = RadialSchedule::new(1.0, 100.0, 5, Spacing::Geometric).unwrap();
        let r = s.radii();
        assert!((r[2] - 10.0).abs() < 1e-12);
        assert_eq!(r[4], 100.0);
        assert_eq!(s.tail_radii(), vec![r[3], r[4]]);
        let l = RadialSchedule::new(0.0 + 1.0, 3.0, 3, Spacing::Linear).unwrap();
        assert_eq!(l.radii(), vec![1.0, 2.0, 3.0]);
        assert!(RadialSchedule::geometric(2.0, 1.0, 5).is_err());
        assert!(RadialSchedule::geometric(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn exp_type_examples() {
        let e = parse_expr("exp(z)").unwrap();
        let et = exp_type(&e, (-FRAC_PI_4, FRAC_PI_4), &sched(), 16).unwrap();
        assert!((et - 1.0).abs() < 0.02, "{et}");
        let one = parse_expr("1").unwrap();
        assert_eq!(exp_type(&one, (-FRAC_PI_4, FRAC_PI_4), &sched(), 16).unwrap(), 0.0);
        let en = parse_expr("exp(-z)").unwrap();
        assert_eq!(exp_type(&en, (-FRAC_PI_4, FRAC_PI_4), &sched(), 16).unwrap(), 0.0);
    }

    #[test]
    fn inner_type_examples() {
        let h = (-FRAC_PI_2, FRAC_PI_2);
        let margins = [0.3, 0.1, 0.03];
        let one = parse_expr("1").unwrap();
        assert_eq!(inner_exp_type(&one, h, &margins, &sched(), 16).unwrap(), 0.0);
        let e = parse_expr("exp(z)").unwrap();
        let v = inner_exp_type(&e, h, &margins, &sched(), 16).unwrap();
        assert!((v - 1.0).abs() < 0.02, "{v}");
        let ei = parse_expr("exp(i*z)").unwrap();
        let ladder = inner_exp_type_ladder(&ei, h, &margins, &sched(), 16).unwrap();
        let last = ladder.last().unwrap().1;
        assert!((last - (FRAC_PI_2 - 0.03).sin()).abs() < 1e-9, "{last}");
        for w in ladder.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        assert!(inner_exp_type(&e, h, &[1.6], &sched(), 16).is_err());
        assert!(inner_exp_type(&e, h, &[0.1, 0.3], &sched(), 16).is_err());
        assert!(inner_exp_type(&e, h, &[0.0], &sched(), 16).is_err());
    }

    #[test]
    fn indicator_examples() {
        let e = parse_expr("exp(z)").unwrap();
        assert!((indicator(&e, 0.0, &sched()).unwrap() - 1.0).abs() < 0.01);
        assert!(indicator(&e, FRAC_PI_2, &sched()).unwrap().abs() < 0.01);
        for theta in [-1.0, -0.4, 0.2, 0.7, 1.3] {
            let h = indicator(&e, theta, &sched()).unwrap();
            assert!((h - theta.cos()).abs() < 0.02);
        }
        let five = parse_expr("5").unwrap();
        let h = indicator(&five, 1.0, &sched()).unwrap();
        let r0 = sched().tail_radii()[0];
        assert!((h - 5.0f64.ln() / r0).abs() < 1e-12 && h < 0.05);
    }

    #[test]
    fn order_examples() {
        let big = RadialSchedule::geometric(1.0, 1e3, 48).unwrap();
        let e = parse_expr("exp(z)").unwrap();
        assert!((order_estimate(&e, &big, 64).unwrap() - 1.0).abs() < 0.05);
        let e2 = parse_expr("exp(z^2)").unwrap();
        assert!((order_estimate(&e2, &big, 64).unwrap() - 2.0).abs() < 0.1);
        let p = parse_expr("z^3 + 1").unwrap();
        let o = order_estimate(&p, &big, 64).unwrap();
        let exact = big
            .tail_radii()
            .into_iter()
            .map(|r: f64| (r.powi(3) + 1.0).ln().ln() / r.ln())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((o - exact).abs() < 1e-3, "{o} vs {exact}");
        assert_eq!(order_estimate(&parse_expr("1").unwrap(), &big, 8).unwrap(), 0.0);
        let c = order_estimate(&parse_expr("3").unwrap(), &big, 8).unwrap();
        assert!(c > 0.0 && c < 0.02);
        let l = parse_expr("log(1 - z)").unwrap();
        assert!(matches!(order_estimate(&l, &big, 8), Err(Error::Parameter(_))));
    }

    #[test]
    fn sub_additivity_and_indicator_bound() {
        let s = sched();
        let sector = (-FRAC_PI_2, FRAC_PI_2);
        let pairs = [("exp(z)", "exp(2*i*z)"), ("exp(-3*z)", "z^4"), ("exp(0.5*z)", "exp(-i*z)")];
        for (a, b) in pairs {
            let fa = parse_expr(a).unwrap();
            let fb = parse_expr(b).unwrap();
            let fs = parse_expr(&format!("({a}) + ({b})")).unwrap();
            let ea = exp_type(&fa, sector, &s, 24).unwrap();
            let eb = exp_type(&fb, sector, &s, 24).unwrap();
            let es = exp_type(&fs, sector, &s, 24).unwrap();
            assert!(es <= ea.max(eb) + 0.05, "{a} + {b}: {es} vs {ea}, {eb}");
            for k in 0..5 {
                let theta = -1.2 + 0.6 * k as f64;
                let sub = (theta - 0.2, theta + 0.2);
                let h = indicator(&fs, theta, &s).unwrap();
                assert!(h <= exp_type(&fs, sub, &s, 8).unwrap() + 0.05);
            }
        }
    }

    #[test]
    fn report_serializes() {
        let e = parse_expr("exp(z)").unwrap();
        let r = growth_report(&e, (-PI / 3.0, PI / 3.0), &[0.3, 0.1], &sched(), 16, 4).unwrap();
        assert!(r.indicator_samples.iter().all(|&(t, _)| t > -PI / 3.0 && t < PI / 3.0));
        assert!(r.order_estimate.is_some());
        let json = serde_json::to_string(&r).unwrap();
        let back: GrowthReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn exp_type_monotone_in_sector(a in -1.5f64..0.0, b in 0.0f64..1.5, grow in 0.0f64..0.5) {
            let f = parse_expr("exp(z) + exp(i*z)").unwrap();
            let s = RadialSchedule::geometric(1.0, 50.0, 16).unwrap();
            // Nested node sets: the larger sector's mesh contains the smaller one's.
            let small: Vec<f64> = sector_angles(a, b, 8).unwrap();
            let mut large = small.clone();
            large.extend([a - grow, b + grow]);
            let es = sector_sup(&f, &small, &s).unwrap().max(0.0);
            let el = sector_sup(&f, &large, &s).unwrap().max(0.0);
            prop_assert!(el >= es);
        }

        #[test]
        fn exp_type_nonnegative(c in -3.0f64..3.0) {
            let f = parse_expr(&format!("exp({c}*z)")).unwrap();
            let s = RadialSchedule::geometric(1.0, 50.0, 8).unwrap();
            let v = exp_type(&f, (-0.5, 0.5), &s, 4).unwrap();
            prop_assert!(v >= 0.0);
            prop_assert!((v - c.max(0.0)).abs() < 1e-9 + 0.13 * c.abs());
        }
    }
}
