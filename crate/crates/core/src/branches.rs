//! Single-valued branches of the argument, logarithm and complex power.
//!
//! A [`BranchCut`] at angle `theta` selects the argument with values in
//! `[theta, theta + 2pi)`. Points on the cut ray itself take the start of the
//! range, so `arg_branch(e^{i theta}, theta) == theta`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCut {
    theta: f64,
}

impl BranchCut {
    /// Cut along the ray at angle `theta`, which must lie in `[-pi, pi)`.
    pub fn new(theta: f64) -> Result<Self> {
        if !(-PI..PI).contains(&theta) {
            return Err(Error::Parameter(format!(
                "branch cut angle {theta} outside [-pi, pi)"
            )));
        }
        Ok(BranchCut { theta })
    }

    /// The branch with values in `[0, 2pi)`, continuous off `[0, inf)`.
    pub const fn positive_axis() -> Self {
        BranchCut { theta: 0.0 }
    }

    /// The branch with values in `[-pi, pi)`. Off the negative real axis it
    /// coincides with the principal argument.
    pub const fn negative_axis() -> Self {
        BranchCut { theta: -PI }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Whether `angle` lies in the closed range `[theta, theta + 2pi]`.
    pub fn contains_angle(&self, angle: f64) -> bool {
        angle >= self.theta && angle <= self.theta + TAU
    }
}

fn check_nonzero(z: Complex64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("argument of zero".into()));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite point {z}")));
    }
    Ok(())
}

/// Argument of `z` in `[cut.theta, cut.theta + 2pi)`.
pub fn arg_branch(z: Complex64, cut: BranchCut) -> Result<f64> {
    check_nonzero(z)?;
    let theta = cut.theta;
    // Rotate so the cut lies on the positive real axis, then measure in [0, 2pi).
    let rotated = z * Complex64::from_polar(1.0, -theta);
    let mut phase = rotated.im.atan2(rotated.re);
    if phase < 0.0 {
        phase += TAU;
    }
    // atan2 of a point just below the axis can round up to exactly 2pi.
    if phase >= TAU {
        phase = 0.0;
    }
    let angle = theta + phase;
    if angle >= theta + TAU {
        Ok(theta)
    } else {
        Ok(angle)
    }
}

/// `log|z| + i arg_branch(z, cut)`.
pub fn log_branch(z: Complex64, cut: BranchCut) -> Result<Complex64> {
    let arg = arg_branch(z, cut)?;
    Ok(Complex64::new(z.norm().ln(), arg))
}

/// Principal argument in `(-pi, pi]`.
pub fn arg_principal(z: Complex64) -> Result<f64> {
    check_nonzero(z)?;
    Ok(z.im.atan2(z.re))
}

/// Principal logarithm, continuous off `(-inf, 0]`.
pub fn log_principal(z: Complex64) -> Result<Complex64> {
    Ok(Complex64::new(z.norm().ln(), arg_principal(z)?))
}

/// `z^zeta = exp(zeta (log|z| + i Arg z))` with `Arg` valued in `[0, 2pi)`.
pub fn power_cut0(z: Complex64, zeta: Complex64) -> Result<Complex64> {
    let log = log_branch(z, BranchCut::positive_axis())?;
    Ok((zeta * log).exp())
}

/// General branch power `exp(s log_branch(w, cut))`.
pub fn power_branch(w: Complex64, s: Complex64, cut: BranchCut) -> Result<Complex64> {
    Ok((s * log_branch(w, cut)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cut_ray_maps_to_range_start() {
        let cut = BranchCut::new(0.7).unwrap();
        let z = Complex64::from_polar(1.0, 0.7);
        assert_eq!(arg_branch(z, cut).unwrap(), 0.7);
        for theta in [-PI, -2.0, -0.3, 0.0, 1.1, 3.0] {
            let cut = BranchCut::new(theta).unwrap();
            let on_ray = Complex64::from_polar(2.5, theta);
            assert_eq!(arg_branch(on_ray, cut).unwrap(), theta);
        }
    }

    #[test]
    fn quadrant_values() {
        let cut = BranchCut::positive_axis();
        assert!((arg_branch(c(0.0, 1.0), cut).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((arg_branch(c(0.0, -1.0), cut).unwrap() - 3.0 * PI / 2.0).abs() < 1e-15);
        assert_eq!(arg_branch(c(1.0, 0.0), cut).unwrap(), 0.0);
        assert_eq!(arg_branch(c(1.0, -0.0), cut).unwrap(), 0.0);
    }

    #[test]
    fn log_values() {
        assert_eq!(log_branch(c(1.0, 0.0), BranchCut::positive_axis()).unwrap(), c(0.0, 0.0));
        let l = log_branch(c(-1.0, 0.0), BranchCut::positive_axis()).unwrap();
        assert!((l - c(0.0, PI)).norm() < 1e-15);
        let l = log_branch(c(-1.0, 0.0), BranchCut::negative_axis()).unwrap();
        assert!((l - c(0.0, -PI)).norm() < 1e-15);
    }

    #[test]
    fn zero_is_a_domain_error() {
        assert!(matches!(
            arg_branch(c(0.0, 0.0), BranchCut::positive_axis()),
            Err(Error::Domain(_))
        ));
        assert!(log_branch(c(0.0, 0.0), BranchCut::negative_axis()).is_err());
        assert!(power_cut0(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn cut_angle_range_checked() {
        assert!(BranchCut::new(PI).is_err());
        assert!(BranchCut::new(-PI).is_ok());
        assert!(BranchCut::new(f64::NAN).is_err());
    }

    #[test]
    fn power_examples() {
        let v = power_cut0(c(-1.0, 0.0), c(0.0, 1.0)).unwrap();
        assert!((v - c((-PI).exp(), 0.0)).norm() < 1e-16);
        assert!((v.re - 0.0432139).abs() < 1e-7);
        assert!((power_cut0(c(0.5, 0.0), c(3.0, 0.0)).unwrap() - c(0.125, 0.0)).norm() < 1e-16);
        assert!((power_cut0(c(0.0, 2.0), c(2.0, 0.0)).unwrap() - c(-4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn branch_range_holds_on_many_points() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let theta = rng.gen_range(-PI..PI);
            let z = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            if z == c(0.0, 0.0) {
                continue;
            }
            let cut = BranchCut::new(theta).unwrap();
            let a = arg_branch(z, cut).unwrap();
            assert!(a >= theta && a < theta + TAU, "z={z} theta={theta} a={a}");
        }
    }

    #[test]
    fn continuous_along_circle_off_cut() {
        // Circle of radius 0.1 around 1+i never meets the cut at angle -2.
        let cut = BranchCut::new(-2.0).unwrap();
        let n = 4096;
        let center = c(1.0, 1.0);
        let mut prev = arg_branch(center + 0.1, cut).unwrap();
        for k in 1..=n {
            let t = TAU * k as f64 / n as f64;
            let a = arg_branch(center + Complex64::from_polar(0.1, t), cut).unwrap();
            assert!((a - prev).abs() < 10.0 * TAU / n as f64);
            prev = a;
        }
    }

    proptest! {
        #[test]
        fn exp_inverts_log(re in -50.0f64..50.0, im in -50.0f64..50.0, theta in -PI..PI) {
            let z = c(re, im);
            prop_assume!(z.norm() > 1e-8);
            let cut = BranchCut::new(theta).unwrap();
            let back = log_branch(z, cut).unwrap().exp();
            prop_assert!((back - z).norm() <= 1e-14 * z.norm());
        }

        #[test]
        fn integer_power_matches_repeated_product(
            re in -3.0f64..3.0, im in -3.0f64..3.0, n in -20i32..=20
        ) {
            let z = c(re, im);
            prop_assume!(z.norm() > 0.1);
            let mut expect = c(1.0, 0.0);
            let factor = if n >= 0 { z } else { z.inv() };
            for _ in 0..n.unsigned_abs() {
                expect *= factor;
            }
            let got = power_cut0(z, c(n as f64, 0.0)).unwrap();
            prop_assert!((got - expect).norm() <= 1e-12 * expect.norm());
        }
    }
}
