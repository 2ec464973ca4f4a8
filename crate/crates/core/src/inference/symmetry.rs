//! Tests of `Z =d θ²/Z` (log-symmetry about θ; self-inverse when θ = 1).
//!
//! The sample of `Z` and the sample that gets reciprocated always come from
//! disjoint draws: either two independent child streams, or the two halves of
//! a supplied sample. A sample is never compared with its own reciprocals.

use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::inference::ks::{check_alpha, ks_two_sample};
use crate::inference::report::TestReport;
use crate::joint::JointSpec;
use crate::ratio::ratio_sample;
use crate::rng::RandomStream;

/// What to test.
pub enum Subject<'a> {
    /// Two independent samples of size `n` from the law.
    Dist {
        spec: &'a DistSpec,
        n: usize,
        stream: &'a mut RandomStream,
    },
    /// Two independent samples of size `n` of the ratio `X / Y`.
    Ratio {
        joint: &'a JointSpec,
        n: usize,
        stream: &'a mut RandomStream,
    },
    /// A supplied sample, split into first and second halves.
    Sample(&'a [f64]),
}

fn halves(subject: Subject<'_>) -> Result<(Vec<f64>, Vec<f64>, Option<u64>, &'static str)> {
    match subject {
        Subject::Dist { spec, n, stream } => {
            let seed = stream.key().seed;
            let mut kids = stream.split(2);
            let a = spec.sample(&mut kids[0], n)?.values;
            let b = spec.sample(&mut kids[1], n)?.values;
            Ok((a, b, Some(seed), "independent-streams"))
        }
        Subject::Ratio { joint, n, stream } => {
            let seed = stream.key().seed;
            let mut kids = stream.split(2);
            let a = ratio_sample(joint, &mut kids[0], n)?.values;
            let b = ratio_sample(joint, &mut kids[1], n)?.values;
            Ok((a, b, Some(seed), "independent-streams"))
        }
        Subject::Sample(values) => {
            let mid = values.len() / 2;
            Ok((
                values[..mid].to_vec(),
                values[mid..].to_vec(),
                None,
                "split-sample",
            ))
        }
    }
}

/// Two-sample KS between `Z` and `θ²/Z'` with `Z'` independent of `Z`.
///
/// `theta != 1` requires strictly positive values.
pub fn self_inverse_test(subject: Subject<'_>, alpha: f64, theta: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::domain("theta", theta, "(0, inf)"));
    }
    let (a, b, seed, path) = halves(subject)?;
    if theta != 1.0 {
        if let Some(v) = a.iter().chain(&b).find(|&&v| !(v > 0.0)) {
            return Err(Error::Input(format!(
                "log-symmetry about theta = {theta} needs positive values, found {v}"
            )));
        }
    }
    if b.contains(&0.0) {
        return Err(Error::Admission("sample contains 0, which has no reciprocal".into()));
    }
    let theta2 = theta * theta;
    let reflected: Vec<f64> = b.iter().map(|&v| theta2 / v).collect();
    let ks = ks_two_sample(&a, &reflected, alpha)?;
    Ok(TestReport {
        test: "self-inverse".into(),
        ..ks
    }
    .with_seed(seed)
    .with("theta", theta)
    .with("path", path))
}

/// Two-sample KS between `log Z` (first half) and `−log Z` (second half).
pub fn log_symmetry_test(sample: &[f64], alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if let Some(v) = sample.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::Input(format!("log-symmetry needs positive values, found {v}")));
    }
    let mid = sample.len() / 2;
    let w1: Vec<f64> = sample[..mid].iter().map(|v| v.ln()).collect();
    let w2: Vec<f64> = sample[mid..].iter().map(|v| -v.ln()).collect();
    let ks = ks_two_sample(&w1, &w2, alpha)?;
    Ok(TestReport {
        test: "log-symmetry".into(),
        ..ks
    })
}
