//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use coefcont::continuation::{residue_partial_sum, tail_integral};
use coefcont::growth::{exp_type, indicator, inner_exp_type, order_estimate, RadialSchedule};
use coefcont::interpolant::{check_r_independence, exp_neg_interpolant, phi_deformed, phi_interpolant};
use coefcont::kernel::{default_constants, integrand_bound, kernel_g, nearest_integer};
use coefcont::{
    builtin_registry, continue_at, lookup, parse_expr, Complex64, ComplexFunction, ContinuationConfig, DecayCertificate,
    InterpolantConfig, SeriesSpec, SharedFunction,
};
use rand::{rngs::StdRng, Rng, SeedableRng};

type Criterion = (&'static str, fn() -> Outcome);
type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    while k > 0 {
        x += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    x
}

/// First `n` Halton points (bases 2, 3) mapped into the disc `|z| <= radius`
/// that satisfy `keep`.
fn disc_points(n: usize, radius: f64, keep: impl Fn(Complex64) -> bool) -> Vec<Complex64> {
    (1..)
        .map(|k| {
            let u = radical_inverse(k, 2);
            let v = radical_inverse(k, 3);
            Complex64::from_polar(radius * u.sqrt(), 2.0 * PI * v)
        })
        .filter(|&z| keep(z))
        .take(n)
        .collect()
}

fn dist_to_positive_axis(z: Complex64) -> f64 {
    if z.re <= 0.0 {
        z.norm()
    } else {
        z.im.abs()
    }
}

fn relative_sweep(label: &str, points: &[Complex64], tol: f64) -> Result<f64, String> {
    let entry = lookup(label).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for &z in points {
        let got = continue_at(&entry.spec, z, None).map_err(|e| format!("{label} at {z}: {e}"))?;
        let want = entry.closed_form.eval(z).map_err(|e| e.to_string())?;
        let rel = (got.value - want).norm() / want.norm().max(1e-300);
        worst = worst.max(rel);
        ensure(rel < tol, || format!("{label} at {z}: {} vs {want}, rel {rel:e}", got.value))?;
    }
    Ok(worst)
}

fn criterion_1() -> Outcome {
    let points = disc_points(100, 5.0, |z| dist_to_positive_axis(z) >= 0.1);
    let worst = relative_sweep("geometric", &points, 1e-8)?;
    Ok(format!("geometric vs 1/(1-z) on 100 points, worst rel {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let left = disc_points(50, 6.0, |z| z.re < 0.0);
    let upper = disc_points(50, 6.0, |z| z.im >= 0.1);
    let mut worst = 0.0f64;
    for label in ["log", "dilog"] {
        worst = worst.max(relative_sweep(label, &left, 1e-6)?);
        worst = worst.max(relative_sweep(label, &upper, 1e-6)?);
    }
    Ok(format!("log and dilog on 2 x 50 points, worst rel {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for entry in builtin_registry().map_err(|e| e.to_string())? {
        for z in [c(0.5, 0.0), c(-0.5, 0.0), c(0.3, 0.6)] {
            for m in [5usize, 8] {
                let mut cfg = ContinuationConfig::auto(&entry.spec, z).map_err(|e| e.to_string())?;
                cfg.m = m;
                let tail = tail_integral(&entry.spec, z, &cfg).map_err(|e| format!("{} {z} m={m}: {e}", entry.label))?;
                let sum = residue_partial_sum(&entry.spec, z, m, 120).map_err(|e| e.to_string())?;
                let dev = (tail.value - sum).norm();
                worst = worst.max(dev);
                ensure(dev < 1e-7, || format!("{} at {z}, m = {m}: deviation {dev:e}", entry.label))?;
            }
        }
    }
    Ok(format!("4 specs x 3 points x 2 splits, worst deviation {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let consts = default_constants();
    let c_far = 1.0 / (1.0 - (-2.0 * PI).exp());
    ensure((consts.c_far - c_far).abs() < 1e-12, || {
        format!("c_far = {} vs {c_far}", consts.c_far)
    })?;
    let phis: Vec<SharedFunction> = ["1", "1/(z+1)", "exp(-z)"]
        .iter()
        .map(|s| Arc::new(parse_expr(s).unwrap()) as SharedFunction)
        .collect();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    while checked < 10_000 {
        let zeta = c(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0));
        if nearest_integer(zeta).0 < consts.r_exclusion {
            continue;
        }
        let z = Complex64::from_polar(rng.gen_range(0.05..20.0), rng.gen_range(0.02..(2.0 * PI - 0.02)));
        let phi = &phis[checked % phis.len()];
        if phi.poles().iter().any(|p| (zeta - p).norm() < 1e-3) {
            continue;
        }
        let g = kernel_g(zeta, z, &**phi).map_err(|e| e.to_string())?;
        let bound = integrand_bound(zeta, z, &**phi, consts).map_err(|e| e.to_string())?;
        let ratio = g.norm() / bound;
        worst = worst.max(ratio);
        ensure(ratio <= 1.0 + 1e-12, || format!("violation at zeta = {zeta}, z = {z}: ratio {ratio}"))?;
        checked += 1;
    }
    Ok(format!(
        "c_far = {:.15}, c = {:.6}, 10^4 points, max |g|/bound {worst:.4}",
        consts.c_far, consts.c
    ))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn criterion_5() -> Outcome {
    let g = parse_expr("exp(-z)").unwrap();
    let cert = DecayCertificate::new(std::f64::consts::E, 0.4, 0.0)
        .and_then(|c| c.verify_span(&g, 1e-3, 1e6))
        .map_err(|e| e.to_string())?;
    let cfg = InterpolantConfig::new(0.5, 0.0);
    let phi = |z: Complex64| phi_interpolant(&g, &cert, &cfg, z).map(|v| v.value).map_err(|e| e.to_string());
    let mut worst = 0.0f64;
    for n in 0..=12u32 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let dev = (phi(c(n as f64, 0.0))? - c(sign / factorial(n), 0.0)).norm();
        worst = worst.max(dev);
        ensure(dev < 1e-8, || format!("phi({n}) off by {dev:e}"))?;
    }
    for k in 1..=5 {
        let dev = phi(c(-(k as f64), 0.0))?.norm();
        worst = worst.max(dev);
        ensure(dev < 1e-8, || format!("phi(-{k}) = {dev:e}"))?;
    }
    let r_dev = check_r_independence(&g, &cert, 0.0, c(1.5, 0.5), &[0.3, 0.5, 0.7], 1e-12).map_err(|e| e.to_string())?;
    ensure(r_dev < 1e-7, || format!("r-dependence {r_dev:e}"))?;
    let numeric = exp_neg_interpolant().map_err(|e| e.to_string())?;
    let sched = RadialSchedule::geometric(1.0, 40.0, 16).map_err(|e| e.to_string())?;
    let et = exp_type(&numeric, (-FRAC_PI_2, FRAC_PI_2), &sched, 16).map_err(|e| e.to_string())?;
    ensure(et <= 3.0 * PI + 0.2, || format!("ET over H = {et}"))?;
    Ok(format!(
        "interpolation dev {worst:.1e}, r-dependence {r_dev:.1e}, ET_H estimate {et:.3} <= {:.3}",
        3.0 * PI + 0.2
    ))
}

fn criterion_6() -> Outcome {
    // exp(-sqrt(1 - zeta)): holomorphic off [1, inf) and decaying off every sector around it.
    let f = parse_expr("exp(i*pow(z-1, 0.5, 0))").unwrap();
    let mellin_cert = DecayCertificate::new(1.0, 0.25, -PI)
        .and_then(|c| c.verify_span(&f, 1e-3, 1e8))
        .map_err(|e| e.to_string())?;
    let cfg = InterpolantConfig::new(0.5, -PI);
    let certs = [(0.2, 13.5), (0.4, 3.7)]
        .map(|(delta, m)| (delta, DecayCertificate::new(m, 0.25, -PI).unwrap()));
    let points = [
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(2.5, 0.0),
        c(0.5, 0.5),
        c(-0.5, 1.0),
        c(-1.5, -0.5),
        c(2.0, 1.0),
        c(3.0, -2.0),
        c(-2.5, 0.0),
        c(1.2, 3.0),
    ];
    let mut worst = 0.0f64;
    for z in points {
        let a = phi_interpolant(&f, &mellin_cert, &cfg, z).map_err(|e| format!("{z}: {e}"))?.value;
        let mut values = Vec::new();
        for (delta, cert) in &certs {
            let b = phi_deformed(&f, cert, *delta, z, 1e-12).map_err(|e| format!("{z}, delta {delta}: {e}"))?.value;
            let dev = (a - b).norm();
            worst = worst.max(dev);
            ensure(dev < 1e-6, || format!("{z}, delta {delta}: {b} vs {a}"))?;
            values.push(b);
        }
        let spread = (values[0] - values[1]).norm();
        ensure(spread < 1e-6, || format!("{z}: delta-dependence {spread:e}"))?;
    }
    let mut scan_max = f64::NEG_INFINITY;
    for (delta, cert) in &certs {
        for theta in [0.0, 0.5, -0.5] {
            for k in 0..8 {
                let r = 5.0 * 8.0f64.powf(k as f64 / 7.0);
                let z = Complex64::from_polar(r, theta);
                let v = phi_deformed(&f, cert, *delta, z, 1e-12).map_err(|e| format!("{z}: {e}"))?.value;
                let rate = v.norm().ln() / r;
                scan_max = scan_max.max(rate - 2.0 * delta);
                ensure(rate <= 2.0 * delta + 0.1, || format!("delta {delta}, {z}: rate {rate}"))?;
            }
        }
    }
    Ok(format!(
        "10 points, worst |deformed - mellin| {worst:.1e}; growth scan max(rate - 2 delta) {scan_max:.3}"
    ))
}

fn criterion_7() -> Outcome {
    let err = |e: coefcont::Error| e.to_string();
    let sched = RadialSchedule::geometric(1.0, 200.0, 48).map_err(err)?;
    let big = RadialSchedule::geometric(1.0, 1e3, 48).map_err(err)?;
    let e = parse_expr("exp(z)").unwrap();
    let et = exp_type(&e, (-FRAC_PI_4, FRAC_PI_4), &sched, 16).map_err(err)?;
    ensure((et - 1.0).abs() <= 0.02, || format!("ET(e^z) = {et}"))?;
    for theta in [-1.2, -0.6, 0.0, 0.6, 1.2] {
        let h = indicator(&e, theta, &sched).map_err(err)?;
        ensure((h - f64::cos(theta)).abs() <= 0.02, || format!("h({theta}) = {h}"))?;
    }
    let o1 = order_estimate(&e, &big, 64).map_err(err)?;
    ensure((o1 - 1.0).abs() <= 0.05, || format!("ord e^z = {o1}"))?;
    let e2 = parse_expr("exp(z^2)").unwrap();
    let o2 = order_estimate(&e2, &big, 64).map_err(err)?;
    ensure((o2 - 2.0).abs() <= 0.1, || format!("ord e^(z^2) = {o2}"))?;
    let one = parse_expr("1").unwrap();
    let iet = inner_exp_type(&one, (-FRAC_PI_2, FRAC_PI_2), &[0.3, 0.1, 0.03], &sched, 16).map_err(err)?;
    ensure(iet == 0.0, || format!("IET(1) = {iet}"))?;
    Ok(format!("ET {et:.4}, orders {o1:.4} and {o2:.4}, IET(1) = {iet}"))
}

fn criterion_8() -> Outcome {
    let phi = Arc::new(exp_neg_interpolant().map_err(|e| e.to_string())?);
    let n0 = 2;
    let head = (0..n0)
        .map(|n| phi.eval(c(n as f64, 0.0)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let spec = SeriesSpec::new(head, phi, n0, "exp(-z) via interpolant").map_err(|e| e.to_string())?;
    let z = c(-3.0, 0.0);
    let got = continue_at(&spec, z, None).map_err(|e| e.to_string())?;
    let want = 3.0f64.exp();
    let rel = (got.value - c(want, 0.0)).norm() / want;
    ensure(rel < 1e-5, || format!("F(-3) = {} vs {want}", got.value))?;
    Ok(format!("F(-3) = {:.12} vs e^3, rel {rel:.1e}", got.value.re))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("geometric continuation", criterion_1),
        ("log and dilog continuation", criterion_2),
        ("residue identity", criterion_3),
        ("kernel bound", criterion_4),
        ("interpolant properties", criterion_5),
        ("deformed-contour consistency", criterion_6),
        ("growth estimators", criterion_7),
        ("cross-module round trip", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
