//! Characteristic functions of `U = log Z` and the iid-ratio obstruction.
//!
//! If `Z = X/Y` with `X, Y` iid and positive, then `log Z = log X − log Y` has
//! characteristic function `|φ(t)|² ≥ 0`. A point `t` where the real part is
//! strictly negative and the imaginary part is negligible refutes every such
//! representation. Claims are restricted to positive `Z`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dist::{DistKind, DistSpec};
use crate::error::{Error, Result};
use crate::inference::report::TestReport;

/// Smallest sample accepted by [`empirical_cf`].
pub const MIN_CF_SAMPLE: usize = 100;

/// Refinement rounds of the analytic minimum search.
const REFINE_ROUNDS: usize = 40;
/// Bisection steps locating the ends of an analytic excursion.
const CROSSING_ROUNDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CfSource {
    Analytic,
    Empirical { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Uniform half-width of the estimation error, 0 for closed forms.
    pub band: f64,
    pub source: CfSource,
    /// Closed form used to refine analytic witnesses.
    law: Option<DistSpec>,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("t grid is empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("t grid must be finite and increasing".into()));
    }
    Ok(())
}

fn log_cf_at(d: &DistSpec, t: f64) -> Complex64 {
    match d.kind() {
        DistKind::LogUniform => {
            if t == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(t.sin() / t, 0.0)
            }
        }
        DistKind::LogRademacher => Complex64::new(t.cos(), 0.0),
        _ => unreachable!("checked by analytic_log_cf"),
    }
}

/// Closed-form cf of `log Z`: `sin t / t` for log-uniform, `cos t` for log-Rademacher.
pub fn analytic_log_cf(d: &DistSpec, t_grid: &[f64]) -> Result<CfCurve> {
    if !matches!(d.kind(), DistKind::LogUniform | DistKind::LogRademacher) {
        return Err(Error::capability(d, "closed-form log characteristic function"));
    }
    check_grid(t_grid)?;
    Ok(CfCurve {
        t_grid: t_grid.to_vec(),
        values: t_grid.iter().map(|&t| log_cf_at(d, t)).collect(),
        band: 0.0,
        source: CfSource::Analytic,
        law: Some(d.clone()),
    })
}

/// `(1/n) Σ exp(i t u_k)` with band `3/sqrt(n)`.
///
/// The band is a heuristic uniform half-width, deliberately wide so that a
/// reported witness is robust. Each term is `cos(t u) + i sin(t u)`, so the
/// value at `-t` is the exact conjugate of the value at `t`.
pub fn empirical_cf(sample: &[f64], t_grid: &[f64]) -> Result<CfCurve> {
    if sample.len() < MIN_CF_SAMPLE {
        return Err(Error::UndersizedSample { got: sample.len(), need: MIN_CF_SAMPLE });
    }
    if sample.iter().any(|u| !u.is_finite()) {
        return Err(Error::InvalidArgument("sample contains non-finite values".into()));
    }
    check_grid(t_grid)?;
    let n = sample.len() as f64;
    let values = t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let (mut re, mut im) = (0.0, 0.0);
            for &u in sample {
                re += (t * u).cos();
                // sin is odd, so negating t negates every term exactly
                im += (t * u).sin();
            }
            Complex64::new(re / n, im / n)
        })
        .collect();
    Ok(CfCurve {
        t_grid: t_grid.to_vec(),
        values,
        band: 3.0 / n.sqrt(),
        source: CfSource::Empirical { n: sample.len() },
        law: None,
    })
}

/// `log |z|` for each value; errors on zero or non-finite input.
pub fn log_abs(sample: &[f64]) -> Result<Vec<f64>> {
    sample
        .iter()
        .map(|&z| {
            if z == 0.0 || !z.is_finite() {
                Err(Error::Input(format!("log|z| undefined at {z}")))
            } else {
                Ok(z.abs().ln())
            }
        })
        .collect()
}

/// Evenly spaced grid of `steps + 1` points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect()
}

fn is_witness(v: Complex64, band: f64) -> bool {
    v.re < -band && v.im.abs() <= band
}

/// Local grid subdivision: resample a shrinking window around the most negative point.
fn deepest(law: &DistSpec, t0: f64, h0: f64) -> (f64, f64) {
    let (mut t, mut h) = (t0, h0);
    let mut best = log_cf_at(law, t).re;
    for _ in 0..REFINE_ROUNDS {
        for s in linear_grid(t - h, t + h, 16) {
            let v = log_cf_at(law, s).re;
            if v < best {
                best = v;
                t = s;
            }
        }
        h /= 4.0;
    }
    (t, best)
}

/// Boundary of the witness set between `outside` and `inside`, by bisection.
fn crossing(law: &DistSpec, band: f64, mut outside: f64, mut inside: f64) -> f64 {
    for _ in 0..CROSSING_ROUNDS {
        let mid = 0.5 * (outside + inside);
        if is_witness(log_cf_at(law, mid), band) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Searches the curve for `t` with `Re φ(t) < −band` and `|Im φ(t)| ≤ band`.
///
/// Grid points satisfying the condition form runs (excursions). The run
/// holding the most negative value is chosen and the witness is its
/// midpoint, the point farthest from the edge of the witness set. For
/// analytic curves the run's end points are refined by bisection on the
/// closed form. The margin is `−Re φ(t) − band` at the witness. The most
/// negative point is also reported, as `deepest_t` and `deepest_re`.
///
/// Reject means a witness was found, refuting an iid ratio representation.
/// Pass means none was found, which proves nothing.
pub fn iid_decomposability_obstruction(curve: &CfCurve, alpha: f64) -> Result<TestReport> {
    let band = curve.band;
    let ts = &curve.t_grid;
    let vs = &curve.values;
    let n = match curve.source {
        CfSource::Analytic => ts.len(),
        CfSource::Empirical { n } => n,
    };
    let min_re = vs.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let best = (0..ts.len())
        .filter(|&i| is_witness(vs[i], band))
        .min_by(|&a, &b| vs[a].re.total_cmp(&vs[b].re));
    let report = match best {
        None => TestReport::exact("iid-obstruction", min_re, false, alpha, n)
            .with("witness", serde_json::Value::Null),
        Some(k) => {
            let mut lo = k;
            while lo > 0 && is_witness(vs[lo - 1], band) {
                lo -= 1;
            }
            let mut hi = k;
            while hi + 1 < ts.len() && is_witness(vs[hi + 1], band) {
                hi += 1;
            }
            let (left, right, t, v, deep_t, deep_re) = match &curve.law {
                Some(law) => {
                    let left = if lo > 0 { crossing(law, band, ts[lo - 1], ts[lo]) } else { ts[lo] };
                    let right = if hi + 1 < ts.len() { crossing(law, band, ts[hi + 1], ts[hi]) } else { ts[hi] };
                    let h = ts.get(k + 1).unwrap_or(&ts[k]) - ts[k.saturating_sub(1)];
                    let (deep_t, deep_re) = deepest(law, ts[k], h.max(f64::EPSILON));
                    let mid = 0.5 * (left + right);
                    let v = log_cf_at(law, mid);
                    if is_witness(v, band) {
                        (left, right, mid, v, deep_t, deep_re)
                    } else {
                        (left, right, deep_t, log_cf_at(law, deep_t), deep_t, deep_re)
                    }
                }
                None => {
                    let m = (lo + hi) / 2;
                    let m = if is_witness(vs[m], band) { m } else { k };
                    (ts[lo], ts[hi], ts[m], vs[m], ts[k], vs[k].re)
                }
            };
            TestReport::exact("iid-obstruction", v.re, true, alpha, n)
                .with("witness", t)
                .with("witness_re", v.re)
                .with("witness_im", v.im)
                .with("margin", -v.re - band)
                .with("excursion", vec![left, right])
                .with("deepest_t", deep_t)
                .with("deepest_re", deep_re)
        }
    };
    Ok(report
        .with("band", band)
        .with("source", serde_json::to_value(curve.source).expect("serializable")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{new_stream, StreamKey};
    use std::f64::consts::PI;

    #[test]
    fn analytic_landmarks() {
        let lu = analytic_log_cf(&DistSpec::log_uniform(), &[0.0, 1.5 * PI]).unwrap();
        assert_eq!(lu.values[0], Complex64::new(1.0, 0.0));
        assert!((lu.values[1].re - (-2.0 / (3.0 * PI))).abs() < 1e-15);
        let lr = analytic_log_cf(&DistSpec::log_rademacher(), &[0.0, PI]).unwrap();
        assert_eq!(lr.values[0].re, 1.0);
        assert_eq!(lr.values[1].re, -1.0);
        assert!(analytic_log_cf(&DistSpec::standard_cauchy(), &[1.0]).is_err());
    }

    #[test]
    fn sinc_witness_and_minimum() {
        // sin t / t < 0 exactly on (π, 2π) within [0, 10]; the witness is the midpoint
        let curve = analytic_log_cf(&DistSpec::log_uniform(), &linear_grid(0.0, 10.0, 1000)).unwrap();
        let r = iid_decomposability_obstruction(&curve, 0.01).unwrap();
        assert!(r.rejected());
        let d = &r.diagnostics;
        let ends = d["excursion"].as_array().unwrap();
        assert!((ends[0].as_f64().unwrap() - PI).abs() < 1e-12);
        assert!((ends[1].as_f64().unwrap() - 2.0 * PI).abs() < 1e-12);
        let t = d["witness"].as_f64().unwrap();
        assert!((t - 1.5 * PI).abs() < 1e-12);
        assert!((d["margin"].as_f64().unwrap() - 2.0 / (3.0 * PI)).abs() < 1e-12);
        // the minimiser solves tan t = t; bisect it independently
        let (mut lo, mut hi) = (4.0f64, 4.7f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.tan() - mid < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((d["deepest_t"].as_f64().unwrap() - lo).abs() < 1e-6);
        assert!((d["deepest_re"].as_f64().unwrap() - lo.sin() / lo).abs() < 1e-12);
    }

    #[test]
    fn rademacher_witness_at_pi() {
        let curve = analytic_log_cf(&DistSpec::log_rademacher(), &linear_grid(0.0, 10.0, 200)).unwrap();
        let r = iid_decomposability_obstruction(&curve, 0.01).unwrap();
        assert!((r.diagnostics["witness"].as_f64().unwrap() - PI).abs() < 1e-12);
        assert!((r.diagnostics["margin"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_does_not_depend_on_grid_resolution() {
        for steps in [37, 200, 5000] {
            let curve = analytic_log_cf(&DistSpec::log_uniform(), &linear_grid(0.0, 10.0, steps)).unwrap();
            let r = iid_decomposability_obstruction(&curve, 0.01).unwrap();
            assert!((r.diagnostics["witness"].as_f64().unwrap() - 1.5 * PI).abs() < 1e-12, "{steps}");
        }
    }

    #[test]
    fn empirical_properties() {
        let mut s = new_stream(StreamKey::new(5, 0));
        let u: Vec<f64> = (0..1000).map(|_| 2.0 * s.uniform01() - 1.0).collect();
        let ts = [-3.0, -0.5, 0.0, 0.5, 3.0];
        let c = empirical_cf(&u, &ts).unwrap();
        assert_eq!(c.values[2], Complex64::new(1.0, 0.0));
        assert_eq!(c.values[0], c.values[4].conj());
        assert_eq!(c.values[1], c.values[3].conj());
        assert!((c.band - 3.0 / 1000f64.sqrt()).abs() < 1e-15);
        assert!(c.values.iter().all(|v| v.norm() <= 1.0 + c.band));
        assert!(empirical_cf(&u[..50], &ts).is_err());
    }

    #[test]
    fn uniform_sample_tracks_sinc() {
        let mut s = new_stream(StreamKey::new(5, 1));
        let u: Vec<f64> = (0..100_000).map(|_| 2.0 * s.uniform01() - 1.0).collect();
        let c = empirical_cf(&u, &[1.5 * PI]).unwrap();
        assert!((c.values[0].re + 0.2122).abs() < 0.0095);
    }

    #[test]
    fn cauchy_log_abs_has_no_witness() {
        let z = DistSpec::standard_cauchy().sample(&mut new_stream(StreamKey::new(5, 2)), 100_000).unwrap();
        let c = empirical_cf(&log_abs(&z.values).unwrap(), &linear_grid(0.0, 10.0, 100)).unwrap();
        assert!(c.values.iter().all(|v| v.re >= -c.band));
        assert!(iid_decomposability_obstruction(&c, 0.01).unwrap().passed());
    }

    #[test]
    fn log_abs_rejects_zero() {
        assert!(log_abs(&[1.0, 0.0]).is_err());
        assert_eq!(log_abs(&[-1.0]).unwrap(), vec![0.0]);
    }
}
