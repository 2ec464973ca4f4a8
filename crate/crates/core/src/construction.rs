//! Exchangeable pairs whose ratio reproduces a given law.
//!
//! For `Z`, `W` and a symmetric Bernoulli `I`, all independent, the pair
//! `(X, Y) = (W Z^I, W Z^(1-I))` is exchangeable and `X / Y = Z^(2I-1)`
//! has the mixture law `½ Law(Z) + ½ Law(1/Z)`. When `Z` is self-inverse
//! the mixture is `Law(Z)` itself.

use std::fmt;

use crate::dist::{DistKind, DistSpec};
use crate::error::Result;
use crate::inference::exchange::{exact_symmetry_check, exchangeability_test, Grid};
use crate::inference::report::TestReport;
use crate::joint::JointSpec;
use crate::rng::RandomStream;
use crate::sample::{PairSample, Provenance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstructedPair {
    z: DistSpec,
    w: DistSpec,
}

/// Admits `z` and `w`; both must put no probability on 0.
pub fn build_pair(z: DistSpec, w: DistSpec) -> Result<ConstructedPair> {
    z.admit_as_ratio_operand("z")?;
    w.admit_as_ratio_operand("w")?;
    Ok(ConstructedPair { z, w })
}

/// `(W Z^I, W Z^(1-I))`.
pub fn power_form(z: f64, w: f64, i: u8) -> (f64, f64) {
    (w * z.powi(i as i32), w * z.powi(1 - i as i32))
}

/// `(W[(1-I) + I Z], W[I + (1-I) Z])`.
pub fn affine_form(z: f64, w: f64, i: u8) -> (f64, f64) {
    let i = i as f64;
    (w * ((1.0 - i) + i * z), w * (i + (1.0 - i) * z))
}

impl ConstructedPair {
    /// `W ≡ 1`.
    pub fn with_unit_weight(z: DistSpec) -> Result<Self> {
        build_pair(z, DistSpec::constant(1.0).expect("1 is finite"))
    }

    pub fn z_dist(&self) -> &DistSpec {
        &self.z
    }

    pub fn w_dist(&self) -> &DistSpec {
        &self.w
    }

    /// `n` pairs.
    ///
    /// Consumes one word of `s` to derive three child streams that feed `Z`,
    /// `W` and `I` respectively; each pair reads one `Z`, then one `W`, then
    /// one `I`. Because the three sources are separate, the `Z` and `I` draws
    /// do not depend on the choice of `W`.
    pub fn sample_constructed(&self, s: &mut RandomStream, n: usize) -> Result<PairSample> {
        if n == 0 {
            return Err(crate::Error::InvalidArgument(
                "sample size must be at least 1".into(),
            ));
        }
        let provenance = Some(Provenance {
            key: s.key(),
            counter: s.counter(),
            spec: self.to_string(),
        });
        let mut children = s.split(3);
        let mut i_stream = children.pop().expect("three children");
        let mut w_stream = children.pop().expect("three children");
        let mut z_stream = children.pop().expect("three children");
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let z = self.z.draw(&mut z_stream);
            let w = self.w.draw(&mut w_stream);
            let i = i_stream.bernoulli_half();
            let (x, y) = power_form(z, w, i);
            xs.push(x);
            ys.push(y);
        }
        Ok(PairSample { xs, ys, provenance })
    }

    /// `Pr[X / Y <= z]` for the constructed ratio, i.e. the mixture CDF.
    pub fn ratio_cdf(&self, z: f64) -> f64 {
        crate::ratio::mixture_cdf(&self.z, z)
    }
}

/// Symmetry test of `(X, Y) =d (Y, X)` on a fresh sample of `n` pairs.
///
/// Discrete tables are checked exactly and ignore `stream`, `n` and `grid`.
pub fn exchangeability_certificate(
    joint: &JointSpec,
    stream: &mut RandomStream,
    n: usize,
    grid: &Grid,
    alpha: f64,
) -> Result<TestReport> {
    if let JointSpec::DiscreteTable(t) = joint {
        return exact_symmetry_check(t, alpha);
    }
    let pairs = joint.sample_joint(stream, n)?;
    Ok(exchangeability_test(&pairs, grid, alpha)?.with("spec", joint.to_string()))
}

impl fmt::Display for ConstructedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if matches!(self.w.kind(), DistKind::Constant { c } if *c == 1.0) {
            write!(f, "constructed(z={})", self.z)
        } else {
            write!(f, "constructed(z={}, w={})", self.z, self.w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{new_stream, StreamKey};
    use crate::Error;

    #[test]
    fn admission() {
        let unit = DistSpec::constant(1.0).unwrap();
        assert!(build_pair(DistSpec::log_uniform(), unit).is_ok());
        assert!(build_pair(DistSpec::standard_cauchy(), DistSpec::normal(0.0, 1.0).unwrap()).is_ok());
        let zero = DistSpec::constant(0.0).unwrap();
        assert!(matches!(build_pair(DistSpec::log_uniform(), zero), Err(Error::Admission(_))));
        assert!(matches!(build_pair(zero, unit), Err(Error::Admission(_))));
    }

    #[test]
    fn algebraic_forms_agree_bitwise() {
        let mut s = new_stream(StreamKey::new(8, 0));
        for _ in 0..10_000 {
            let z = DistSpec::standard_cauchy().draw(&mut s);
            let w = s.normal01();
            let i = s.bernoulli_half();
            let (a, b) = power_form(z, w, i);
            let (c, d) = affine_form(z, w, i);
            assert_eq!(a.to_bits(), c.to_bits());
            assert_eq!(b.to_bits(), d.to_bits());
        }
    }

    #[test]
    fn unit_weight_exposes_z() {
        let pair = ConstructedPair::with_unit_weight(DistSpec::log_uniform()).unwrap();
        let draws = pair.sample_constructed(&mut new_stream(StreamKey::new(2, 0)), 1000).unwrap();
        for (x, y) in draws.iter() {
            assert!(x == 1.0 || y == 1.0);
        }
    }

    #[test]
    fn ratio_does_not_depend_on_weight() {
        let unit = ConstructedPair::with_unit_weight(DistSpec::log_uniform()).unwrap();
        let gauss = build_pair(DistSpec::log_uniform(), DistSpec::normal(0.0, 1.0).unwrap()).unwrap();
        let a = unit.sample_constructed(&mut new_stream(StreamKey::new(4, 4)), 5000).unwrap();
        let b = gauss.sample_constructed(&mut new_stream(StreamKey::new(4, 4)), 5000).unwrap();
        for k in 0..a.len() {
            let ra = a.xs[k] / a.ys[k];
            let rb = b.xs[k] / b.ys[k];
            // W cancels algebraically; (w z) / w may round one ulp away from z
            assert!((ra - rb).abs() <= 4.0 * f64::EPSILON * ra.abs(), "{ra} vs {rb}");
        }
    }

    #[test]
    fn certificates() {
        let grid = Grid::Quantiles(6);
        let c = JointSpec::constructed(DistSpec::log_uniform(), DistSpec::constant(1.0).unwrap()).unwrap();
        let r = exchangeability_certificate(&c, &mut new_stream(StreamKey::new(21, 0)), 100_000, &grid, 0.01).unwrap();
        assert!(r.passed(), "{r:?}");
        let n = DistSpec::normal(0.0, 1.0).unwrap();
        let p = JointSpec::product(n.clone(), n).unwrap();
        let r = exchangeability_certificate(&p, &mut new_stream(StreamKey::new(21, 1)), 100_000, &grid, 0.01).unwrap();
        assert!(r.passed(), "{r:?}");
        let d = JointSpec::discrete_paper();
        let r = exchangeability_certificate(&d, &mut new_stream(StreamKey::new(21, 2)), 1, &grid, 0.01).unwrap();
        assert!(r.rejected());
        assert_eq!(r.diagnostics["witness_prob"], "9/36");
    }
}
