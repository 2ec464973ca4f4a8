//! Laws of `Z = X / Y`.
//!
//! For a joint density `f`, the ratio density is
//!
//! ```text
//! f_Z(z) = ∫_0^∞ y f(yz, y) dy − ∫_{−∞}^0 y f(yz, y) dy
//! ```
//!
//! Each half-line piece is integrated separately (the integrand has a kink at
//! `y = 0`) with the `tan` substitution of [`crate::quadrature`]. Piecewise
//! uniform joints are integrated exactly rectangle by rectangle.
//!
//! `g(x, y) = x / y` takes the value 0 when `xy = 0`. Samplers never rely on
//! that convention: a drawn zero denominator is an error.

use std::collections::BTreeMap;

use num_rational::Rational64;

use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::joint::{to_f64, DiscreteTable, JointSpec, RegionUniform};
use crate::quadrature;
use crate::rng::RandomStream;
use crate::sample::{PairSample, Provenance, Sample};

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-2;

/// Which ratio to evaluate: `X / Y`, or `Y / X` from the same joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Direct,
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioDensity {
    pub value: f64,
    pub error_bound: f64,
}

/// Density of `X / Y` at `z`, to absolute tolerance `tol`.
pub fn ratio_density(joint: &JointSpec, z: f64, tol: f64) -> Result<RatioDensity> {
    oriented_ratio_density(joint, z, tol, Orientation::Direct)
}

/// Density of `Y / X` at `z`: the same integral with the density arguments exchanged.
pub fn swapped_ratio_density(joint: &JointSpec, z: f64, tol: f64) -> Result<RatioDensity> {
    oriented_ratio_density(joint, z, tol, Orientation::Swapped)
}

pub fn oriented_ratio_density(
    joint: &JointSpec,
    z: f64,
    tol: f64,
    orientation: Orientation,
) -> Result<RatioDensity> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::domain("tol", tol, "[1e-12, 1e-2]"));
    }
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must be finite")));
    }
    if let JointSpec::RegionUniform(r) = joint {
        return Ok(RatioDensity {
            value: region_ratio_density(r, z, orientation),
            error_bound: 0.0,
        });
    }
    if !joint.has_density() {
        return Err(Error::capability(joint, "joint density (ratio density needs one)"));
    }
    let f = |y: f64| {
        let density = match orientation {
            Orientation::Direct => joint.joint_density(y * z, y),
            Orientation::Swapped => joint.joint_density(y, y * z),
        };
        y * density.unwrap_or(0.0)
    };
    let upper = quadrature::integrate(f, 0.0, f64::INFINITY, tol / 2.0)?;
    let lower = quadrature::integrate(f, f64::NEG_INFINITY, 0.0, tol / 2.0)?;
    Ok(RatioDensity {
        value: upper.value - lower.value,
        error_bound: upper.error_bound + lower.error_bound,
    })
}

/// `∫ |y| dy` over `(lo, hi)`.
fn abs_moment(lo: f64, hi: f64) -> f64 {
    let prim = |y: f64| 0.5 * y * y.abs();
    prim(hi) - prim(lo)
}

fn region_ratio_density(region: &RegionUniform, z: f64, orientation: Orientation) -> f64 {
    region
        .rects()
        .iter()
        .map(|r| {
            let (x0, x1, y0, y1) = match orientation {
                Orientation::Direct => (to_f64(r.x0), to_f64(r.x1), to_f64(r.y0), to_f64(r.y1)),
                Orientation::Swapped => (to_f64(r.y0), to_f64(r.y1), to_f64(r.x0), to_f64(r.x1)),
            };
            // {y in (y0, y1) : yz in (x0, x1)}
            let (lo, hi) = if z > 0.0 {
                (y0.max(x0 / z), y1.min(x1 / z))
            } else if z < 0.0 {
                (y0.max(x1 / z), y1.min(x0 / z))
            } else if x0 < 0.0 && 0.0 < x1 {
                (y0, y1)
            } else {
                return 0.0;
            };
            if lo >= hi {
                0.0
            } else {
                to_f64(r.density) * abs_moment(lo, hi)
            }
        })
        .sum()
}

/// Exact law of a ratio of discrete variables, keyed by reduced fractions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatioPmf {
    probs: BTreeMap<Rational64, Rational64>,
}

impl RatioPmf {
    pub fn prob(&self, q: Rational64) -> Rational64 {
        self.probs.get(&q).copied().unwrap_or_else(|| Rational64::from_integer(0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational64, &Rational64)> {
        self.probs.iter()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> Rational64 {
        self.probs
            .values()
            .fold(Rational64::from_integer(0), |a, b| a + b)
    }

    /// Law of the reciprocal ratio, by inverting every key.
    pub fn reciprocal(&self) -> Result<RatioPmf> {
        let mut probs = BTreeMap::new();
        for (&q, &p) in &self.probs {
            if *q.numer() == 0 {
                return Err(Error::ZeroSupport(
                    "ratio value 0 has positive mass; its reciprocal is undefined".into(),
                ));
            }
            *probs.entry(q.recip()).or_insert_with(|| Rational64::from_integer(0)) += p;
        }
        Ok(RatioPmf { probs })
    }
}

/// Exact pmf of `X / Y` by enumerating every support cell.
pub fn ratio_pmf(table: &DiscreteTable) -> Result<RatioPmf> {
    if let Some(y) = table.ys().iter().find(|y| *y.numer() == 0) {
        return Err(Error::ZeroSupport(format!("y = {y} in the support of Y")));
    }
    let zero = Rational64::from_integer(0);
    let mut probs = BTreeMap::new();
    for (x, row) in table.xs().iter().zip(table.probs()) {
        for (y, p) in table.ys().iter().zip(row) {
            if *p == zero {
                continue;
            }
            // Ratio::new reduces, so 2/4 and 1/2 share a key
            let q = Rational64::new(
                x.numer().checked_mul(*y.denom()).ok_or_else(overflow)?,
                x.denom().checked_mul(*y.numer()).ok_or_else(overflow)?,
            );
            *probs.entry(q).or_insert(zero) += p;
        }
    }
    Ok(RatioPmf { probs })
}

fn overflow() -> Error {
    Error::InvalidArgument("support value overflows 64-bit rationals".into())
}

/// Density of `1 / Z` at `z`: `f(1/z) / z²`, and 0 at `z = 0`.
pub fn reciprocal_density(d: &DistSpec, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(d.density(1.0 / z)? / (z * z))
}

/// `Pr[1/Z <= z]`, assuming `Pr[Z = 0] = 0`.
///
/// * `z > 0`: `Pr[Z < 0] + Pr[Z >= 1/z] = F(0) + 1 − F(1/z−)`
/// * `z = 0`: `Pr[Z < 0] = F(0)`
/// * `z < 0`: `Pr[1/z <= Z < 0] = F(0) − F(1/z−)`
pub fn reciprocal_cdf(d: &DistSpec, z: f64) -> f64 {
    let below_zero = d.cdf_left(0.0);
    if z > 0.0 {
        below_zero + 1.0 - d.cdf_left(1.0 / z)
    } else if z < 0.0 {
        below_zero - d.cdf_left(1.0 / z)
    } else {
        below_zero
    }
    .clamp(0.0, 1.0)
}

/// `½ Pr[Z <= z] + ½ Pr[1/Z <= z]`.
pub fn mixture_cdf(d: &DistSpec, z: f64) -> f64 {
    0.5 * d.cdf(z) + 0.5 * reciprocal_cdf(d, z)
}

/// Componentwise `X / Y` (or `Y / X`) of drawn pairs. A zero denominator is an error.
pub fn ratios_of(pairs: &PairSample, orientation: Orientation) -> Result<Sample> {
    let (num, den) = match orientation {
        Orientation::Direct => (&pairs.xs, &pairs.ys),
        Orientation::Swapped => (&pairs.ys, &pairs.xs),
    };
    let mut values = Vec::with_capacity(num.len());
    for (index, (&a, &b)) in num.iter().zip(den).enumerate() {
        if b == 0.0 {
            let key = pairs.provenance.as_ref().map(|p| p.key);
            return Err(Error::ZeroDenominator {
                index,
                seed: key.map_or(0, |k| k.seed),
                stream_id: key.map_or(0, |k| k.stream_id),
            });
        }
        values.push(a / b);
    }
    let provenance = pairs.provenance.as_ref().map(|p| Provenance {
        spec: match orientation {
            Orientation::Direct => format!("ratio({})", p.spec),
            Orientation::Swapped => format!("swapped-ratio({})", p.spec),
        },
        ..p.clone()
    });
    Ok(Sample::new(values, provenance))
}

/// `n` draws of `X / Y`.
pub fn ratio_sample(joint: &JointSpec, s: &mut RandomStream, n: usize) -> Result<Sample> {
    ratios_of(&joint.sample_joint(s, n)?, Orientation::Direct)
}

/// `n` draws of `Y / X`; for an equal stream this reuses the pairs behind [`ratio_sample`].
pub fn swapped_ratio_sample(joint: &JointSpec, s: &mut RandomStream, n: usize) -> Result<Sample> {
    ratios_of(&joint.sample_joint(s, n)?, Orientation::Swapped)
}
