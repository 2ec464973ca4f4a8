//! Scalar distribution catalog.
//!
//! Every law carries its density (when it has one), its CDF, and a sampler
//! driven by a [`RandomStream`]. All CDFs are closed forms.

use std::f64::consts::{E, PI, SQRT_2};
use std::fmt;

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sample::{Provenance, Sample};
use crate::special;

/// The laws in the catalog. Construct through [`DistSpec`] so parameters are checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistKind {
    StandardCauchy,
    Cauchy { mu: f64, sigma: f64 },
    /// Law of X/Y for a unit-variance bivariate normal with correlation `rho`.
    CorrNormalRatio { rho: f64 },
    /// F(n, n), the ratio of two iid chi-square(n) variables.
    FRatio { n: u32 },
    /// Density `sqrt(2) / (pi (1 + x^4))`.
    Laha,
    /// `Z = exp(U)`, `U ~ U(-1, 1)`.
    LogUniform,
    /// `Z = exp(U)`, `U = ±1` with probability 1/2 each.
    LogRademacher,
    Exponential { rate: f64 },
    Constant { c: f64 },
    Normal { mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub has_density: bool,
    pub has_cdf: bool,
    pub has_sampler: bool,
}

/// A validated scalar law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistSpec(DistKind);

fn finite(param: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(param, v, "finite reals"))
    }
}

fn positive(param: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(param, v, "(0, inf)"))
    }
}

impl DistSpec {
    pub fn standard_cauchy() -> Self {
        DistSpec(DistKind::StandardCauchy)
    }

    pub fn cauchy(mu: f64, sigma: f64) -> Result<Self> {
        Ok(DistSpec(DistKind::Cauchy {
            mu: finite("mu", mu)?,
            sigma: positive("sigma", sigma)?,
        }))
    }

    pub fn corr_normal_ratio(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > -1.0 && rho < 1.0) {
            return Err(Error::domain("rho", rho, "(-1, 1)"));
        }
        Ok(DistSpec(DistKind::CorrNormalRatio { rho }))
    }

    pub fn f_ratio(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", n, "positive integers"));
        }
        Ok(DistSpec(DistKind::FRatio { n }))
    }

    pub fn laha() -> Self {
        DistSpec(DistKind::Laha)
    }

    pub fn log_uniform() -> Self {
        DistSpec(DistKind::LogUniform)
    }

    pub fn log_rademacher() -> Self {
        DistSpec(DistKind::LogRademacher)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(DistSpec(DistKind::Exponential {
            rate: positive("rate", rate)?,
        }))
    }

    /// A point mass. `constant(0)` is a valid law but is refused wherever a
    /// ratio operand is admitted.
    pub fn constant(c: f64) -> Result<Self> {
        Ok(DistSpec(DistKind::Constant {
            c: finite("c", c)?,
        }))
    }

    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(DistSpec(DistKind::Normal {
            mu: finite("mu", mu)?,
            sigma: positive("sigma", sigma)?,
        }))
    }

    pub fn kind(&self) -> &DistKind {
        &self.0
    }

    pub fn capabilities(&self) -> Capabilities {
        let has_density = !matches!(self.0, DistKind::LogRademacher | DistKind::Constant { .. });
        Capabilities {
            has_density,
            has_cdf: true,
            has_sampler: true,
        }
    }

    /// Ground-truth label: does the law equal the law of its reciprocal?
    ///
    /// A Cauchy(mu, sigma) variable has reciprocal
    /// Cauchy(mu / (mu² + sigma²), sigma / (mu² + sigma²)), so it is
    /// self-inverse exactly when `mu² + sigma² = 1`.
    pub fn is_self_inverse(&self) -> bool {
        match self.0 {
            DistKind::StandardCauchy
            | DistKind::CorrNormalRatio { .. }
            | DistKind::FRatio { .. }
            | DistKind::LogUniform
            | DistKind::LogRademacher => true,
            DistKind::Cauchy { mu, sigma } => (mu * mu + sigma * sigma - 1.0).abs() < 1e-12,
            DistKind::Constant { c } => c == 1.0 || c == -1.0,
            // the quartic law's reciprocal has density sqrt(2) z² / (pi (1 + z⁴))
            DistKind::Laha | DistKind::Exponential { .. } | DistKind::Normal { .. } => false,
        }
    }

    /// True when the law puts positive probability on 0.
    pub fn has_atom_at_zero(&self) -> bool {
        matches!(self.0, DistKind::Constant { c } if c == 0.0)
    }

    /// Refuses laws that cannot serve as a ratio numerator or denominator.
    pub fn admit_as_ratio_operand(&self, role: &str) -> Result<()> {
        if self.has_atom_at_zero() {
            return Err(Error::Admission(format!(
                "{role} = {self} puts positive probability on 0"
            )));
        }
        Ok(())
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        let f = match self.0 {
            DistKind::StandardCauchy => 1.0 / (PI * (1.0 + x * x)),
            DistKind::Cauchy { mu, sigma } => {
                let u = (x - mu) / sigma;
                1.0 / (PI * sigma * (1.0 + u * u))
            }
            DistKind::CorrNormalRatio { rho } => {
                let s2 = 1.0 - rho * rho;
                s2.sqrt() / (PI * (s2 + (x - rho) * (x - rho)))
            }
            DistKind::FRatio { n } => f_density(n, x),
            DistKind::Laha => SQRT_2 / (PI * (1.0 + x.powi(4))),
            DistKind::LogUniform => {
                if (E.recip()..=E).contains(&x) {
                    0.5 / x
                } else {
                    0.0
                }
            }
            DistKind::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            DistKind::Normal { mu, sigma } => special::normal_pdf((x - mu) / sigma) / sigma,
            DistKind::LogRademacher | DistKind::Constant { .. } => {
                return Err(Error::capability(self, "density"))
            }
        };
        Ok(f)
    }

    /// `Pr[Z <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.0 {
            DistKind::StandardCauchy => cauchy_cdf(0.0, 1.0, x),
            DistKind::Cauchy { mu, sigma } => cauchy_cdf(mu, sigma, x),
            DistKind::CorrNormalRatio { rho } => cauchy_cdf(rho, (1.0 - rho * rho).sqrt(), x),
            DistKind::FRatio { n } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    let a = 0.5 * n as f64;
                    // I_{x/(1+x)}(a, a) = 1 − I_{1/(1+x)}(a, a); use the branch away from 1
                    if x <= 1.0 {
                        special::beta_reg(a, a, x / (1.0 + x))
                    } else {
                        1.0 - special::beta_reg(a, a, 1.0 / (1.0 + x))
                    }
                }
            }
            DistKind::Laha => special::laha_cdf(x),
            DistKind::LogUniform => {
                if x <= 0.0 {
                    0.0
                } else {
                    ((x.ln() + 1.0) * 0.5).clamp(0.0, 1.0)
                }
            }
            DistKind::LogRademacher => {
                if x < E.recip() {
                    0.0
                } else if x < E {
                    0.5
                } else {
                    1.0
                }
            }
            DistKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistKind::Constant { c } => {
                if x < c {
                    0.0
                } else {
                    1.0
                }
            }
            DistKind::Normal { mu, sigma } => special::normal_cdf((x - mu) / sigma),
        }
    }

    /// `Pr[Z < x]`; differs from [`cdf`](Self::cdf) only at atoms.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self.0 {
            DistKind::LogRademacher => {
                if x <= E.recip() {
                    0.0
                } else if x <= E {
                    0.5
                } else {
                    1.0
                }
            }
            DistKind::Constant { c } => {
                if x <= c {
                    0.0
                } else {
                    1.0
                }
            }
            _ => self.cdf(x),
        }
    }

    /// One draw.
    ///
    /// * Cauchy family: inversion, `mu + sigma tan(pi (u - 1/2))`.
    /// * corr-normal-ratio: `X / Y` with `X = N1`, `Y = rho N1 + sqrt(1 - rho²) N2`.
    /// * f-ratio(n): ratio of two independent chi-square(n) draws.
    /// * laha: rejection from the standard Cauchy envelope (see [`laha_envelope_constant`]).
    pub fn draw(&self, s: &mut RandomStream) -> f64 {
        match self.0 {
            DistKind::StandardCauchy => cauchy_draw(s),
            DistKind::Cauchy { mu, sigma } => mu + sigma * cauchy_draw(s),
            DistKind::CorrNormalRatio { rho } => {
                let (x, y) = correlated_normals(rho, s);
                x / y
            }
            DistKind::FRatio { n } => chi_square(n, s) / chi_square(n, s),
            DistKind::Laha => laha_draw(s),
            DistKind::LogUniform => (2.0 * s.uniform01() - 1.0).exp(),
            DistKind::LogRademacher => {
                if s.bernoulli_half() == 1 {
                    E
                } else {
                    E.recip()
                }
            }
            DistKind::Exponential { rate } => -s.uniform_open01().ln() / rate,
            DistKind::Constant { c } => c,
            DistKind::Normal { mu, sigma } => mu + sigma * s.normal01(),
        }
    }

    /// `n` iid draws.
    pub fn sample(&self, s: &mut RandomStream, n: usize) -> Result<Sample> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be at least 1".into()));
        }
        let provenance = Provenance {
            key: s.key(),
            counter: s.counter(),
            spec: self.to_string(),
        };
        let values = (0..n).map(|_| self.draw(s)).collect();
        Ok(Sample::new(values, Some(provenance)))
    }
}

fn cauchy_cdf(mu: f64, sigma: f64, x: f64) -> f64 {
    0.5 + ((x - mu) / sigma).atan() / PI
}

fn cauchy_draw(s: &mut RandomStream) -> f64 {
    (PI * (s.uniform_open01() - 0.5)).tan()
}

fn f_density(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let a = 0.5 * n as f64;
    if x == 0.0 {
        return match n {
            1 => f64::INFINITY,
            2 => 1.0,
            _ => 0.0,
        };
    }
    ((a - 1.0) * x.ln() - 2.0 * a * x.ln_1p() - special::ln_beta(a, a)).exp()
}

pub(crate) fn correlated_normals(rho: f64, s: &mut RandomStream) -> (f64, f64) {
    let z1 = s.normal01();
    let z2 = s.normal01();
    (z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2)
}

/// Chi-square(n): a sum of `n` squared normals for `n <= 64`, otherwise
/// `2 Gamma(n/2)` by Marsaglia–Tsang.
fn chi_square(n: u32, s: &mut RandomStream) -> f64 {
    if n <= 64 {
        (0..n).map(|_| s.normal01().powi(2)).sum()
    } else {
        2.0 * gamma_marsaglia_tsang(0.5 * n as f64, s)
    }
}

fn gamma_marsaglia_tsang(shape: f64, s: &mut RandomStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = s.normal01();
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u = s.uniform_open01();
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

/// Envelope constant for sampling the quartic law from a standard Cauchy.
///
/// The density ratio is `h(x) = sqrt(2) (1 + x²) / (1 + x⁴)`. With `s = x²`,
/// `d/ds (1 + s)/(1 + s²) = 0` gives `s² + 2s − 1 = 0`, so `s = sqrt(2) − 1`.
/// There `1 + s² = 4 − 2 sqrt(2)` and `1 + s = sqrt(2)`, hence
/// `h = sqrt(2) sqrt(2) / (4 − 2 sqrt(2)) = (2 + sqrt(2)) / 2 ≈ 1.7071`.
pub fn laha_envelope_constant() -> f64 {
    (2.0 + SQRT_2) / 2.0
}

fn laha_draw(s: &mut RandomStream) -> f64 {
    let m = laha_envelope_constant();
    loop {
        let x = cauchy_draw(s);
        let x2 = x * x;
        let ratio = SQRT_2 * (1.0 + x2) / (1.0 + x2 * x2);
        if s.uniform01() * m < ratio {
            return x;
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            DistKind::StandardCauchy => write!(f, "cauchy"),
            DistKind::Cauchy { mu, sigma } => write!(f, "cauchy({mu}, {sigma})"),
            DistKind::CorrNormalRatio { rho } => write!(f, "corr-normal-ratio({rho})"),
            DistKind::FRatio { n } => write!(f, "f-ratio({n})"),
            DistKind::Laha => write!(f, "laha"),
            DistKind::LogUniform => write!(f, "log-uniform"),
            DistKind::LogRademacher => write!(f, "log-rademacher"),
            DistKind::Exponential { rate } => write!(f, "exponential({rate})"),
            DistKind::Constant { c } => write!(f, "constant({c})"),
            DistKind::Normal { mu, sigma } => write!(f, "normal({mu}, {sigma})"),
        }
    }
}
