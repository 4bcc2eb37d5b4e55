//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex-valued
//! integrands of a real parameter.
//!
//! Several parameter intervals (one or more per contour piece) share a single
//! error budget: the interval with the largest error estimate is bisected
//! until the summed estimate meets the tolerance. Interval error estimates use
//! the QUADPACK rescaling with a round-off floor of `50 eps * int |f|`; an
//! interval at its floor is never split again, so integrals whose value is
//! small compared with `int |f|` terminate with a round-off limited estimate
//! instead of exhausting the budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Total number of intervals the adaptive scheme may create.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_intervals: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
    /// Set when every remaining interval sits at its round-off floor.
    pub roundoff_limited: bool,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    piece: usize,
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Rule {
    value: Complex64,
    error: f64,
    at_floor: bool,
}

fn gauss_kronrod<F>(f: &mut F, piece: usize, a: f64, b: f64) -> Result<Rule>
where
    F: FnMut(usize, f64) -> Result<Complex64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 15];
    let fc = f(piece, center)?;
    values[14] = fc;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(piece, center - dx)?;
        let f2 = f(piece, center + dx)?;
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[7];
    for j in 0..7 {
        asc += ((values[2 * j] - mean).norm() + (values[2 * j + 1] - mean).norm()) * WGK[j];
    }
    let width = half.abs();
    let value = kronrod * half;
    let res_abs = abs_sum * width;
    let res_asc = asc * width;
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let at_floor = error <= floor;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Evaluation {
            at: Complex64::new(center, 0.0),
            reason: format!("non-finite integrand on piece {piece} over [{a}, {b}]"),
        });
    }
    Ok(Rule {
        value,
        error: error.max(floor),
        at_floor,
    })
}

/// Integrate `f(piece, t)` over the given `(piece, a, b)` parameter intervals
/// and return the sum.
pub fn integrate<F>(mut f: F, segments: &[(usize, f64, f64)], cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(usize, f64) -> Result<Complex64>,
{
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Interval> = Vec::new();
    let mut evaluations = 0usize;

    for &(piece, a, b) in segments {
        if a == b {
            continue;
        }
        let rule = gauss_kronrod(&mut f, piece, a, b)?;
        evaluations += 15;
        let iv = Interval {
            piece,
            a,
            b,
            value: rule.value,
            error: rule.error,
        };
        if rule.at_floor {
            settled.push(iv);
        } else {
            heap.push(iv);
        }
    }

    // Value and the error still open to refinement; settled intervals only
    // contribute their value.
    let total = |heap: &BinaryHeap<Interval>, settled: &[Interval]| {
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for iv in heap.iter() {
            value += iv.value;
            error += iv.error;
        }
        for iv in settled {
            value += iv.value;
        }
        (value, error)
    };

    let (mut value, mut error) = total(&heap, &settled);
    let mut steps = 0usize;
    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * value.norm());
        if error <= target {
            break;
        }
        let intervals = heap.len() + settled.len();
        if intervals >= cfg.max_intervals {
            return Err(Error::Accuracy {
                estimate: value,
                error,
                tolerance: target,
            });
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let scale = worst.a.abs().max(worst.b.abs()).max(1.0);
        if (worst.b - worst.a).abs() <= 1e-13 * scale || mid == worst.a || mid == worst.b {
            error -= worst.error;
            settled.push(worst);
            continue;
        }
        let left = gauss_kronrod(&mut f, worst.piece, worst.a, mid)?;
        let right = gauss_kronrod(&mut f, worst.piece, mid, worst.b)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        for (rule, a, b) in [(left, worst.a, mid), (right, mid, worst.b)] {
            let iv = Interval {
                piece: worst.piece,
                a,
                b,
                value: rule.value,
                error: rule.error,
            };
            if rule.at_floor {
                error -= iv.error;
                settled.push(iv);
            } else {
                heap.push(iv);
            }
        }
        steps += 1;
        if steps.is_multiple_of(64) {
            (value, error) = total(&heap, &settled);
        }
    }

    let value: Complex64 = heap.iter().chain(settled.iter()).map(|iv| iv.value).sum();
    let error: f64 = heap.iter().chain(settled.iter()).map(|iv| iv.error).sum();
    let target = cfg.abs_tol.max(cfg.rel_tol * value.norm());
    Ok(QuadResult {
        value,
        error,
        evaluations,
        intervals: heap.len() + settled.len(),
        roundoff_limited: error > target,
    })
}

/// Breakpoints `start, start + 1, start + 2, start + 4, ...` up to `end`, so
/// that long ray segments begin with intervals of geometrically growing width.
pub fn geometric_breakpoints(start: f64, end: f64) -> Vec<f64> {
    let mut points = vec![start];
    let mut step = 1.0f64.max(start.abs() * 0.25);
    let mut x = start + step;
    while x < end {
        points.push(x);
        step *= 2.0;
        x = start + step;
    }
    points.push(end);
    points
}
