//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Infinite limits are handled by the substitution `x = tan θ`, so an
//! integral over `[a, ∞)` becomes one over `[atan a, π/2)` with weight
//! `1 + x²`. The 15-point rule is open, so `θ = ±π/2` is never evaluated.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate `Σ |K15 − G7|` meets the tolerance. No interval is bisected past
//! depth [`MAX_DEPTH`], and at most [`MAX_INTERVALS`] intervals are kept.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

pub const MAX_DEPTH: u32 = 50;
pub const MAX_INTERVALS: usize = 20_000;

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_bound: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else if v.is_nan() {
        0.0
    } else {
        v
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite_or_zero(f(centre));
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = finite_or_zero(f(centre - dx));
        let f2 = finite_or_zero(f(centre + dx));
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Integrates `f` over `[a, b]`; either limit may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidArgument("NaN integration limit".into()));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_bound: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, tol)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }
    if a.is_finite() && b.is_finite() {
        return adapt(&f, a, b, tol);
    }
    let lo = if a.is_finite() { a.atan() } else { -FRAC_PI_2 };
    let hi = if b.is_finite() { b.atan() } else { FRAC_PI_2 };
    let g = |theta: f64| {
        let x = theta.tan();
        f(x) * (1.0 + x * x)
    };
    adapt(&g, lo, hi, tol)
}

/// Integrates over `[a, b]` split at the given interior points, each piece to an
/// equal share of `tol`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<QuadResult> {
    let mut edges = vec![a];
    let mut interior: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    edges.extend(interior);
    edges.push(b);
    let share = tol / (edges.len() - 1) as f64;
    let mut total = QuadResult {
        value: 0.0,
        error_bound: 0.0,
        evaluations: 0,
    };
    for w in edges.windows(2) {
        let r = integrate(&f, w[0], w[1], share)?;
        total.value += r.value;
        total.error_bound += r.error_bound;
        total.evaluations += r.evaluations;
    }
    Ok(total)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let (v0, e0) = gk15(f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value: v0,
        error: e0,
        depth: 0,
    });
    let mut frozen: Vec<Piece> = Vec::new();
    let mut total_value = v0;
    let mut total_error = e0;

    loop {
        let floor = 50.0 * f64::EPSILON * total_value.abs();
        if total_error <= tol.max(floor) {
            break;
        }
        if heap.len() + frozen.len() >= MAX_INTERVALS {
            break;
        }
        let Some(p) = heap.pop() else { break };
        if p.depth >= MAX_DEPTH {
            frozen.push(p);
            continue;
        }
        let mid = 0.5 * (p.a + p.b);
        let (vl, el) = gk15(f, p.a, mid);
        let (vr, er) = gk15(f, mid, p.b);
        evaluations += 30;
        total_value += vl + vr - p.value;
        total_error += el + er - p.error;
        heap.push(Piece {
            a: p.a,
            b: mid,
            value: vl,
            error: el,
            depth: p.depth + 1,
        });
        heap.push(Piece {
            a: mid,
            b: p.b,
            value: vr,
            error: er,
            depth: p.depth + 1,
        });
    }

    // resum to shed drift from the running updates
    let pieces = heap.iter().chain(frozen.iter());
    let (value, error_bound) = pieces.fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    let floor = 50.0 * f64::EPSILON * value.abs();
    if !value.is_finite() || error_bound > tol.max(floor) {
        return Err(Error::NonConvergence {
            estimate: value,
            error_bound,
            tol,
        });
    }
    Ok(QuadResult {
        value,
        error_bound,
        evaluations,
    })
}
