//! The continuation kernel `g(zeta, z) = phi(zeta) z^zeta / (e^{2 pi i zeta} - 1)`,
//! its majorants, and the truncation radius they imply for the sector rays.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branches::{arg_branch, BranchCut};
use crate::error::{Error, Result};
use crate::function::ComplexFunction;

/// Integers closer than this to a kernel argument are treated as poles.
pub const POLE_GUARD: f64 = 1e-9;

pub const DEFAULT_EXCLUSION: f64 = 0.25;

/// Constants of the bound `1/|e^{2 pi i zeta} - 1| <= c exp(pi Im zeta - pi |Im zeta|)`
/// valid outside the discs `D(n, r_exclusion)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundConstants {
    pub c_far: f64,
    pub c_near: f64,
    pub r_exclusion: f64,
    pub c: f64,
}

/// `pi - |Arg z - pi|` and `log|z|`, with `Arg` valued in `[0, 2pi)`.
pub fn point_constants(z: Complex64) -> Result<(f64, f64)> {
    check_off_positive_axis(z)?;
    let arg = arg_branch(z, BranchCut::positive_axis())?;
    Ok((PI - (arg - PI).abs(), z.norm().ln()))
}

/// Admissible points: off `[0, inf)`, or inside the unit disc on `(0, 1)`,
/// where `Arg z = 0` continues the branch from the upper half-plane.
fn check_off_positive_axis(z: Complex64) -> Result<()> {
    if z.im == 0.0 && (z.re == 0.0 || z.re >= 1.0) {
        return Err(Error::Branch(format!("{z} lies on the excluded part of [0, inf)")));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Branch(format!("non-finite point {z}")));
    }
    Ok(())
}

/// Distance from `zeta` to the nearest integer, and that integer.
pub fn nearest_integer(zeta: Complex64) -> (f64, f64) {
    let n = zeta.re.round();
    (Complex64::new(zeta.re - n, zeta.im).norm(), n)
}

/// `e^{w} - 1` without cancellation for small `w`.
fn expm1(w: Complex64) -> Complex64 {
    let half = (0.5 * w.im).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * half * half,
        w.re.exp() * w.im.sin(),
    )
}

/// `1 / (e^{2 pi i zeta} - 1)` expressed as `exp(log_scale) * factor` so that
/// the exponential part can be combined with other exponents before
/// exponentiating.
fn reciprocal_parts(zeta: Complex64) -> (Complex64, Complex64) {
    let (_, n) = nearest_integer(zeta);
    let w = Complex64::new(0.0, TAU) * Complex64::new(zeta.re - n, zeta.im);
    if zeta.im >= 0.0 {
        (Complex64::new(0.0, 0.0), expm1(w).inv())
    } else {
        // 1/(e^w - 1) = e^{-w} / (1 - e^{-w}), with |e^{-w}| < 1.
        (-w, -(expm1(-w)).inv())
    }
}

/// The kernel `phi(zeta) z^zeta / (e^{2 pi i zeta} - 1)` with `z^zeta` on the
/// branch `Arg z in [0, 2pi)`.
pub fn kernel_g(zeta: Complex64, z: Complex64, phi: &dyn ComplexFunction) -> Result<Complex64> {
    check_off_positive_axis(z)?;
    let (distance, _) = nearest_integer(zeta);
    if distance < POLE_GUARD {
        return Err(Error::PoleProximity { zeta, distance });
    }
    let log_z = Complex64::new(z.norm().ln(), arg_branch(z, BranchCut::positive_axis())?);
    let (scale, factor) = reciprocal_parts(zeta);
    let value = phi.eval(zeta)? * (zeta * log_z + scale).exp() * factor;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::eval(zeta, "kernel overflow"));
    }
    Ok(value)
}

/// `q(zeta) = |e^{2 pi i zeta} - 1| exp(pi Im zeta - pi |Im zeta|)`.
fn q(zeta: Complex64) -> f64 {
    let w = Complex64::new(0.0, TAU) * zeta;
    if zeta.im >= 0.0 {
        expm1(w).norm()
    } else {
        expm1(-w).norm()
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Minimum of `q` over `[-1,1]^2` minus the discs `D(n, r)`.
fn minimize_q(r: f64) -> f64 {
    let excluded = |zeta: Complex64| nearest_integer(zeta).0 < r;
    // Dense grid over the box.
    let steps = 2000;
    let h = 2.0 / steps as f64;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let x = -1.0 + h * i as f64;
        for j in 0..=steps {
            let zeta = Complex64::new(x, -1.0 + h * j as f64);
            if !excluded(zeta) {
                best = best.min(q(zeta));
            }
        }
    }
    // The minimum is attained on a disc boundary or the box edge; refine there.
    for n in [-1.0, 0.0, 1.0] {
        let on_circle = |t: f64| {
            let zeta = Complex64::new(n, 0.0) + Complex64::from_polar(r, t);
            if zeta.re.abs() > 1.0 {
                f64::INFINITY
            } else {
                q(zeta)
            }
        };
        let samples = 720;
        let dt = TAU / samples as f64;
        let (mut k_best, mut v_best) = (0, f64::INFINITY);
        for k in 0..samples {
            let v = on_circle(k as f64 * dt);
            if v < v_best {
                k_best = k;
                v_best = v;
            }
        }
        let t0 = k_best as f64 * dt;
        best = best.min(v_best).min(golden_min(on_circle, t0 - dt, t0 + dt));
    }
    for edge in [-1.0, 1.0] {
        let top = |x: f64| q(Complex64::new(x, edge));
        best = best.min(golden_min(top, -1.0, 1.0));
    }
    best
}

/// Compute the reciprocal-bound constants for excluded discs of radius `r_exclusion`.
pub fn reciprocal_bound_constant(r_exclusion: f64) -> Result<KernelBoundConstants> {
    if !(r_exclusion > 0.0 && r_exclusion < 0.5) {
        return Err(Error::Parameter(format!(
            "exclusion radius {r_exclusion} outside (0, 1/2)"
        )));
    }
    let c_far = 1.0 / (1.0 - (-TAU).exp());
    let c_near = 1.0 / minimize_q(r_exclusion);
    Ok(KernelBoundConstants {
        c_far,
        c_near,
        r_exclusion,
        c: c_far.max(c_near),
    })
}

/// Constants for the default exclusion radius, computed once.
pub fn default_constants() -> &'static KernelBoundConstants {
    static CONSTANTS: std::sync::OnceLock<KernelBoundConstants> = std::sync::OnceLock::new();
    CONSTANTS.get_or_init(|| reciprocal_bound_constant(DEFAULT_EXCLUSION).expect("valid radius"))
}

/// `log|phi(zeta)| / |zeta|`, `-inf` at zeros of `phi`.
pub fn epsilon_of(phi: &dyn ComplexFunction, zeta: Complex64) -> Result<f64> {
    if zeta.norm() == 0.0 {
        return Err(Error::Domain("epsilon is undefined at zeta = 0".into()));
    }
    Ok(phi.log_abs(zeta)? / zeta.norm())
}

/// Majorant `c exp(log|z| Re zeta - a |Im zeta| + log|phi(zeta)|)` of `|g(zeta, z)|`.
pub fn integrand_bound(
    zeta: Complex64,
    z: Complex64,
    phi: &dyn ComplexFunction,
    consts: &KernelBoundConstants,
) -> Result<f64> {
    let (distance, n) = nearest_integer(zeta);
    if distance < consts.r_exclusion {
        return Err(Error::Precondition(format!(
            "{zeta} lies inside the excluded disc around {n}"
        )));
    }
    let (a, b) = point_constants(z)?;
    let exponent = b * zeta.re - a * zeta.im.abs() + phi.log_abs(zeta)?;
    Ok(consts.c * exponent.exp())
}

/// Decay rate `log|z| cos theta - a sin theta` of the majorant along the rays.
pub fn ray_decay_rate(z: Complex64, theta: f64) -> Result<f64> {
    let (a, b) = point_constants(z)?;
    Ok(b * theta.cos() - a * theta.sin())
}

/// Radius beyond which the ray contributions of the tail integral are below `tol`.
pub fn truncation_radius(
    z: Complex64,
    theta: f64,
    phi: &dyn ComplexFunction,
    consts: &KernelBoundConstants,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    let lambda = ray_decay_rate(z, theta)?;
    if lambda >= 0.0 || lambda.abs() < 1e-6 {
        return Err(Error::Configuration(format!(
            "ray decay rate {lambda:e} at theta = {theta} is not safely negative; increase theta"
        )));
    }
    let rate = lambda.abs();
    let base = (consts.c / (tol * rate)).ln().max(1.0) / rate;
    let mut radius = 2.0 * base;
    for _ in 0..60 {
        let ends = [Complex64::from_polar(radius, theta), Complex64::from_polar(radius, -theta)];
        let mut ok = true;
        for zeta in ends {
            match integrand_bound(zeta, z, phi, consts) {
                Ok(bound) if bound < tol => {}
                Ok(_) | Err(Error::Precondition(_)) | Err(Error::Evaluation { .. }) => ok = false,
                Err(e) => return Err(e),
            }
        }
        if ok {
            return Ok(radius);
        }
        radius *= 2.0;
    }
    Err(Error::Configuration(format!(
        "no truncation radius found for z = {z}, theta = {theta}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_value_at_half() {
        let one = parse_expr("1").unwrap();
        let v = kernel_g(c(0.5, 0.0), c(0.5, 0.0), &one).unwrap();
        assert!((v - c(-0.5f64.sqrt() / 2.0, 0.0)).norm() < 1e-15);
        assert!((v.re + 0.353553).abs() < 1e-6);
    }

    #[test]
    fn kernel_residue() {
        let one = parse_expr("1").unwrap();
        let z = c(0.5, 0.0);
        let expect = c(0.25, 0.0) / c(0.0, TAU);
        let h = 1e-6;
        let v = kernel_g(c(2.0 + h, 0.0), z, &one).unwrap() * h;
        assert!((v - expect).norm() < 1e-5 * expect.norm());
    }

    #[test]
    fn residue_limit_extrapolates() {
        let phi = parse_expr("1/(z+1)").unwrap();
        let z = c(-0.7, 0.4);
        let n = 3.0;
        let target = (phi.eval(c(n, 0.0)).unwrap() * z.powf(n)).norm() / TAU;
        let at = |h: f64| h * kernel_g(c(n + h, 0.0), z, &phi).unwrap().norm();
        let (a, b) = (at(1e-4), at(1e-5));
        // Error is linear in h, so one Richardson step removes it.
        let extrapolated = (10.0 * b - a) / 9.0;
        assert!((extrapolated - target).abs() < 1e-8, "{extrapolated} {target}");
        assert!((at(1e-3) - target).abs() > (at(1e-5) - target).abs());
    }

    #[test]
    fn kernel_modulus_on_imaginary_axis() {
        let one = parse_expr("1").unwrap();
        for t in [0.5, 1.0, 3.0] {
            let zeta = c(0.0, t);
            let v = kernel_g(zeta, c(-1.0, 0.0), &one).unwrap();
            let denom = ((-TAU * t).exp() - 1.0).abs();
            assert!((v.norm() - (-PI * t).exp() / denom).abs() < 1e-14);
        }
    }

    #[test]
    fn kernel_errors() {
        let one = parse_expr("1").unwrap();
        assert!(matches!(
            kernel_g(c(3.0 + 1e-11, 0.0), c(-1.0, 0.0), &one),
            Err(Error::PoleProximity { .. })
        ));
        assert!(matches!(kernel_g(c(0.5, 0.2), c(2.0, 0.0), &one), Err(Error::Branch(_))));
        assert!(kernel_g(c(0.5, 0.2), c(1.0, 0.0), &one).is_err());
        assert!(kernel_g(c(0.5, 0.2), c(0.0, 0.0), &one).is_err());
    }

    #[test]
    fn kernel_is_stable_far_below_the_axis() {
        let one = parse_expr("1").unwrap();
        let v = kernel_g(c(3.0, -400.0), c(-2.0, 0.5), &one).unwrap();
        assert!(v.norm().is_finite());
        let v = kernel_g(c(3.0, 400.0), c(-2.0, 0.5), &one).unwrap();
        assert!(v.norm().is_finite());
    }

    #[test]
    fn constants() {
        let k = reciprocal_bound_constant(0.25).unwrap();
        assert!((k.c_far - 1.0 / (1.0 - (-TAU).exp())).abs() < 1e-15);
        assert!((k.c_far - 1.001867).abs() < 1e-5);
        assert!(k.c >= k.c_far && k.c >= k.c_near);
        assert!(reciprocal_bound_constant(0.5).is_err());
        assert!(reciprocal_bound_constant(0.0).is_err());
    }

    #[test]
    fn c_near_matches_brute_force_grid() {
        let r = 0.25;
        let k = reciprocal_bound_constant(r).unwrap();
        // Independent oracle: plain grid at step 1e-3 plus dense disc boundaries.
        let mut min = f64::INFINITY;
        let qf = |x: f64, y: f64| {
            let e = Complex64::new(0.0, TAU * x).exp() * (-TAU * y).exp();
            (e - 1.0).norm() * (PI * y - PI * y.abs()).exp()
        };
        for i in 0..=2000 {
            for j in 0..=2000 {
                let (x, y) = (-1.0 + 1e-3 * i as f64, -1.0 + 1e-3 * j as f64);
                if (x - x.round()).hypot(y) >= r {
                    min = min.min(qf(x, y));
                }
            }
        }
        for n in [-1.0f64, 0.0, 1.0] {
            for k in 0..100_000 {
                let t = TAU * k as f64 / 100_000.0;
                let (x, y) = (n + r * t.cos(), r * t.sin());
                if x.abs() <= 1.0 {
                    min = min.min(qf(x, y));
                }
            }
        }
        assert!((1.0 / min - k.c_near).abs() < 1e-9 * k.c_near, "{} {}", 1.0 / min, k.c_near);
        assert!(k.c_near > 1.2 && k.c_near < 1.35);
    }

    #[test]
    fn spot_check_half_plus_half_i() {
        let k = default_constants();
        let zeta = c(0.5, 0.5);
        let lhs = 1.0 / ((c(0.0, TAU) * zeta).exp() - 1.0).norm();
        assert!(lhs <= k.c);
    }

    #[test]
    fn reciprocal_bound_holds_on_random_points() {
        let k = default_constants();
        let mut rng = StdRng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 10_000 {
            let zeta = c(rng.gen_range(-6.0..6.0), rng.gen_range(-3.0..3.0));
            if nearest_integer(zeta).0 < k.r_exclusion {
                continue;
            }
            let lhs = 1.0 / ((c(0.0, TAU) * zeta).exp() - 1.0).norm();
            let rhs = k.c * (PI * zeta.im - PI * zeta.im.abs()).exp();
            assert!(lhs <= rhs, "{zeta}: {lhs} > {rhs}");
            checked += 1;
        }
    }

    #[test]
    fn epsilon_examples() {
        let one = parse_expr("1").unwrap();
        assert_eq!(epsilon_of(&one, c(3.0, 4.0)).unwrap(), 0.0);
        let e = parse_expr("exp(z)").unwrap();
        assert!((epsilon_of(&e, c(10.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        let inv = parse_expr("1/z").unwrap();
        assert!((epsilon_of(&inv, c(100.0, 0.0)).unwrap() + 100f64.ln() / 100.0).abs() < 1e-15);
        assert!(epsilon_of(&one, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn integrand_bound_examples() {
        let k = default_constants();
        let one = parse_expr("1").unwrap();
        let zeta = Complex64::from_polar(5.0, 0.5);
        let z = c(-1.0, 0.0);
        let bound = integrand_bound(zeta, z, &one, k).unwrap();
        let expect = k.c * (-PI * 5.0 * 0.5f64.sin()).exp();
        assert!((bound - expect).abs() < 1e-14 * expect);
        assert!(bound >= kernel_g(zeta, z, &one).unwrap().norm());
        let unit = Complex64::from_polar(1.0, 2.0);
        assert!((integrand_bound(c(2.5, 0.0), unit, &one, k).unwrap() - k.c).abs() < 1e-14);
        assert!(matches!(
            integrand_bound(c(2.1, 0.0), z, &one, k),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn integrand_bound_dominates_kernel() {
        let k = default_constants();
        let phis = [parse_expr("1").unwrap(), parse_expr("1/(z+1)").unwrap(), parse_expr("exp(z/3)").unwrap()];
        let mut rng = StdRng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 10_000 {
            let zeta = c(rng.gen_range(0.5..30.0), rng.gen_range(-20.0..20.0));
            let z = Complex64::from_polar(rng.gen_range(0.05..8.0), rng.gen_range(0.01..TAU - 0.01));
            if nearest_integer(zeta).0 < k.r_exclusion {
                continue;
            }
            let phi = &phis[checked % 3];
            let g = kernel_g(zeta, z, phi).unwrap().norm();
            let bound = integrand_bound(zeta, z, phi, k).unwrap();
            assert!(g <= bound * (1.0 + 1e-12), "zeta={zeta} z={z}: {g} > {bound}");
            checked += 1;
        }
    }

    #[test]
    fn truncation_radius_examples() {
        let k = default_constants();
        let one = parse_expr("1").unwrap();
        let z = c(-1.0, 0.0);
        let r = truncation_radius(z, PI / 4.0, &one, k, 1e-10).unwrap();
        let lambda = PI * (PI / 4.0).sin();
        let expect = 2.0 * (k.c / (1e-10 * lambda)).ln() / lambda;
        assert!((r - expect).abs() < 1e-9, "{r} vs {expect}");
        assert!(r > 18.0 && r < 24.0);
        let r2 = truncation_radius(z, PI / 4.0, &one, k, 0.5e-10).unwrap();
        assert!((r2 - r - 2.0 * 2f64.ln() / lambda).abs() < 1e-9);
        // log 3 cos theta - (pi/2) sin theta vanishes near theta = 0.6106.
        let z = c(0.0, 3.0);
        let theta = (2.0 * 3f64.ln() / PI).atan();
        assert!(matches!(
            truncation_radius(z, theta, &one, k, 1e-10),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(
            truncation_radius(z, 0.3, &one, k, 1e-10),
            Err(Error::Configuration(_))
        ));
    }
}
