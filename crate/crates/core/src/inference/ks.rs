//! Kolmogorov–Smirnov tests with asymptotic p-values.
//!
//! With `D` the sup-distance between CDFs and `n_e` the effective size
//! (`n` for one sample, `nm/(n+m)` for two), the p-value is
//! `Q_KS((sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) D)` where
//! `Q_KS(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)` (Stephens' small-sample
//! correction of the Kolmogorov limit).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::report::TestReport;
use crate::rng::{new_stream, StreamKey};
use crate::special::kolmogorov_survival;

pub const MIN_SAMPLE: usize = 25;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha, "(0, 1)"))
    }
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let root = n_eff.sqrt();
    kolmogorov_survival((root + 0.12 + 0.11 / root) * d)
}

/// Sup-distance between the empirical CDFs of two samples; ties are stepped together.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    for s in [a, b] {
        if s.len() < MIN_SAMPLE {
            return Err(Error::UndersizedSample {
                got: s.len(),
                need: MIN_SAMPLE,
            });
        }
    }
    let d = ks_two_sample_statistic(a, b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let p = ks_p_value(d, n * m / (n + m));
    Ok(TestReport::from_p_value("ks-two-sample", d, p, alpha, a.len() + b.len())
        .with("n_a", a.len())
        .with("n_b", b.len()))
}

/// One-sample test against a continuous reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(a: &[f64], cdf: F, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if a.len() < MIN_SAMPLE {
        return Err(Error::UndersizedSample {
            got: a.len(),
            need: MIN_SAMPLE,
        });
    }
    let xs = sorted(a)?;
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max);
    let p = ks_p_value(d, n);
    Ok(TestReport::from_p_value("ks-one-sample", d, p, alpha, xs.len()))
}

/// Fraction of `trials` two-sample tests on independent same-law samples
/// (two uniform samples of size `n` from stream `(seed, trial)`) that reject at `alpha`.
///
/// Trials run in parallel; each owns its stream, so the result is deterministic.
pub fn null_rejection_rate(trials: usize, n: usize, alpha: f64, seed: u64) -> Result<f64> {
    let rejections: Result<Vec<bool>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut s = new_stream(StreamKey::new(seed, trial));
            let a: Vec<f64> = (0..n).map(|_| s.uniform01()).collect();
            let b: Vec<f64> = (0..n).map(|_| s.uniform01()).collect();
            Ok(ks_two_sample(&a, &b, alpha)?.rejected())
        })
        .collect();
    let rejections = rejections?;
    Ok(rejections.iter().filter(|&&r| r).count() as f64 / trials as f64)
}
