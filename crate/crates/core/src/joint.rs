//! Bivariate laws of `(X, Y)`.

use std::f64::consts::PI;
use std::fmt;

use num_rational::Rational64;
use num_traits::CheckedAdd;

use crate::construction::{self, ConstructedPair};
use crate::dist::{correlated_normals, DistSpec};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::sample::{PairSample, Provenance};

/// Finite joint pmf with exact rational entries. `probs[i][j] = Pr[X = xs[i], Y = ys[j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteTable {
    xs: Vec<Rational64>,
    ys: Vec<Rational64>,
    probs: Vec<Vec<Rational64>>,
}

impl DiscreteTable {
    pub fn new(
        xs: Vec<Rational64>,
        ys: Vec<Rational64>,
        probs: Vec<Vec<Rational64>>,
    ) -> Result<Self> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::InvalidArgument("table support must be nonempty".into()));
        }
        if probs.len() != xs.len() || probs.iter().any(|row| row.len() != ys.len()) {
            return Err(Error::InvalidArgument(format!(
                "probability matrix must be {}x{}",
                xs.len(),
                ys.len()
            )));
        }
        for (name, support) in [("x", &xs), ("y", &ys)] {
            let mut sorted = support.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != support.len() {
                return Err(Error::InvalidArgument(format!(
                    "{name} support values must be distinct"
                )));
            }
        }
        let zero = Rational64::from_integer(0);
        let mut total = zero;
        for p in probs.iter().flatten() {
            if *p < zero {
                return Err(Error::domain("probability", p, "[0, 1]"));
            }
            total = total
                .checked_add(p)
                .ok_or_else(|| Error::InvalidArgument("probability sum overflows".into()))?;
        }
        if total != Rational64::from_integer(1) {
            return Err(Error::domain("probability total", total, "exactly 1"));
        }
        Ok(DiscreteTable { xs, ys, probs })
    }

    /// The 3×3 table on {1,2,3}² with uniform marginals whose ratio is not self-inverse.
    pub fn paper() -> Self {
        let r = |n: i64| Rational64::new(n, 36);
        let support: Vec<Rational64> = (1..=3).map(Rational64::from_integer).collect();
        DiscreteTable {
            xs: support.clone(),
            ys: support,
            probs: vec![
                vec![r(2), r(9), r(1)],
                vec![r(1), r(2), r(9)],
                vec![r(9), r(1), r(2)],
            ],
        }
    }

    pub fn xs(&self) -> &[Rational64] {
        &self.xs
    }

    pub fn ys(&self) -> &[Rational64] {
        &self.ys
    }

    pub fn probs(&self) -> &[Vec<Rational64>] {
        &self.probs
    }

    /// `Pr[X = x, Y = y]`, zero off the support.
    pub fn prob(&self, x: Rational64, y: Rational64) -> Rational64 {
        let i = self.xs.iter().position(|&v| v == x);
        let j = self.ys.iter().position(|&v| v == y);
        match (i, j) {
            (Some(i), Some(j)) => self.probs[i][j],
            _ => Rational64::from_integer(0),
        }
    }

    pub fn marginal_x(&self) -> Vec<Rational64> {
        self.probs
            .iter()
            .map(|row| row.iter().fold(Rational64::from_integer(0), |a, b| a + b))
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<Rational64> {
        (0..self.ys.len())
            .map(|j| {
                self.probs
                    .iter()
                    .fold(Rational64::from_integer(0), |a, row| a + row[j])
            })
            .collect()
    }

    pub fn total(&self) -> Rational64 {
        self.probs
            .iter()
            .flatten()
            .fold(Rational64::from_integer(0), |a, b| a + b)
    }

    /// The table of `(Y, X)`.
    pub fn transposed(&self) -> Self {
        let probs = (0..self.ys.len())
            .map(|j| self.probs.iter().map(|row| row[j]).collect())
            .collect();
        DiscreteTable {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            probs,
        }
    }

    /// First support point `(x, y)`, in row-major order, where
    /// `Pr[X=x, Y=y] != Pr[X=y, Y=x]`, with both probabilities.
    pub fn symmetry_witness(&self) -> Option<((Rational64, Rational64), Rational64, Rational64)> {
        let mut points: Vec<Rational64> = self.xs.iter().chain(self.ys.iter()).copied().collect();
        points.sort();
        points.dedup();
        for &x in &self.xs {
            for &y in &self.ys {
                let p = self.prob(x, y);
                let q = self.prob(y, x);
                if p != q {
                    return Some(((x, y), p, q));
                }
            }
        }
        // cells only present in the transposed support
        for &x in &points {
            for &y in &points {
                let p = self.prob(x, y);
                let q = self.prob(y, x);
                if p != q {
                    return Some(((x, y), p, q));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_witness().is_none()
    }

    fn sample_pair(&self, cumulative: &[f64], s: &mut RandomStream) -> (f64, f64) {
        let u = s.uniform01();
        let idx = cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1);
        let (i, j) = (idx / self.ys.len(), idx % self.ys.len());
        (to_f64(self.xs[i]), to_f64(self.ys[j]))
    }

    /// Exact row-major cumulative cell masses, converted to floats.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = Rational64::from_integer(0);
        self.probs
            .iter()
            .flatten()
            .map(|p| {
                acc += p;
                to_f64(acc)
            })
            .collect()
    }
}

pub(crate) fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// An open axis-aligned rectangle carrying constant density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: Rational64,
    pub x1: Rational64,
    pub y0: Rational64,
    pub y1: Rational64,
    pub density: Rational64,
}

impl Rect {
    pub fn mass(&self) -> Rational64 {
        (self.x1 - self.x0) * (self.y1 - self.y0) * self.density
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        to_f64(self.x0) < x && x < to_f64(self.x1) && to_f64(self.y0) < y && y < to_f64(self.y1)
    }

    fn overlaps(&self, o: &Rect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    fn transposed(&self) -> Rect {
        Rect {
            x0: self.y0,
            x1: self.y1,
            y0: self.x0,
            y1: self.x1,
            density: self.density,
        }
    }
}

/// Piecewise-constant density on disjoint rectangles, total mass exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionUniform {
    rects: Vec<Rect>,
}

impl RegionUniform {
    pub fn new(rects: Vec<Rect>) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::InvalidArgument("at least one rectangle is required".into()));
        }
        let zero = Rational64::from_integer(0);
        for r in &rects {
            if r.x0 >= r.x1 || r.y0 >= r.y1 {
                return Err(Error::InvalidArgument(format!(
                    "rectangle ({}, {}) x ({}, {}) is empty",
                    r.x0, r.x1, r.y0, r.y1
                )));
            }
            if r.density <= zero {
                return Err(Error::domain("density", r.density, "(0, inf)"));
            }
        }
        for (i, a) in rects.iter().enumerate() {
            if rects[i + 1..].iter().any(|b| a.overlaps(b)) {
                return Err(Error::InvalidArgument("rectangles must be disjoint".into()));
            }
        }
        let total = rects.iter().fold(zero, |acc, r| acc + r.mass());
        if total != Rational64::from_integer(1) {
            return Err(Error::domain("total mass", total, "exactly 1"));
        }
        Ok(RegionUniform { rects })
    }

    /// Density 1/3 on (0,1)x(1,2), (1,2)x(2,3) and (2,3)x(0,1): both marginals
    /// are U(0, 3) yet the ratio is not self-inverse.
    pub fn paper() -> Self {
        let i = Rational64::from_integer;
        let third = Rational64::new(1, 3);
        RegionUniform {
            rects: vec![
                Rect { x0: i(0), x1: i(1), y0: i(1), y1: i(2), density: third },
                Rect { x0: i(1), x1: i(2), y0: i(2), y1: i(3), density: third },
                Rect { x0: i(2), x1: i(3), y0: i(0), y1: i(1), density: third },
            ],
        }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        self.rects
            .iter()
            .find(|r| r.contains(x, y))
            .map_or(0.0, |r| to_f64(r.density))
    }

    pub fn transposed(&self) -> Self {
        RegionUniform {
            rects: self.rects.iter().map(Rect::transposed).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let t = self.transposed();
        self.rects.len() == t.rects.len() && t.rects.iter().all(|r| self.rects.contains(r))
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = Rational64::from_integer(0);
        self.rects
            .iter()
            .map(|r| {
                acc += r.mass();
                to_f64(acc)
            })
            .collect()
    }

    /// Draw order: the rectangle index `I` by inversion of one uniform, then
    /// `U1`, `U2` open uniforms; `(X, Y) = (x0 + (x1 − x0) U1, y0 + (y1 − y0) U2)`.
    /// For the built-in table this is `(I + U1, J + U2)` with `J = I + 1 mod 3`.
    fn sample_pair(&self, cumulative: &[f64], s: &mut RandomStream) -> (f64, f64) {
        let u = s.uniform01();
        let idx = cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1);
        let r = &self.rects[idx];
        let u1 = s.uniform_open01();
        let u2 = s.uniform_open01();
        let x0 = to_f64(r.x0);
        let y0 = to_f64(r.y0);
        (
            x0 + (to_f64(r.x1) - x0) * u1,
            y0 + (to_f64(r.y1) - y0) * u2,
        )
    }
}

/// Unit-variance bivariate normal with correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateNormal {
    rho: f64,
}

impl BivariateNormal {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > -1.0 && rho < 1.0) {
            return Err(Error::domain("rho", rho, "(-1, 1)"));
        }
        Ok(BivariateNormal { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        let s2 = 1.0 - self.rho * self.rho;
        let q = (x * x - 2.0 * self.rho * x * y + y * y) / s2;
        (-0.5 * q).exp() / (2.0 * PI * s2.sqrt())
    }
}

/// A bivariate law.
#[derive(Debug, Clone, PartialEq)]
pub enum JointSpec {
    /// Independent `X ~ x`, `Y ~ y`.
    Product { x: DistSpec, y: DistSpec },
    BivariateNormal(BivariateNormal),
    DiscreteTable(DiscreteTable),
    RegionUniform(RegionUniform),
    /// `(W Z^I, W Z^(1-I))`.
    Constructed(ConstructedPair),
}

impl JointSpec {
    /// Independent product; both factors must put no mass on 0.
    pub fn product(x: DistSpec, y: DistSpec) -> Result<Self> {
        x.admit_as_ratio_operand("x")?;
        y.admit_as_ratio_operand("y")?;
        Ok(JointSpec::Product { x, y })
    }

    pub fn bivariate_normal(rho: f64) -> Result<Self> {
        Ok(JointSpec::BivariateNormal(BivariateNormal::new(rho)?))
    }

    pub fn discrete_paper() -> Self {
        JointSpec::DiscreteTable(DiscreteTable::paper())
    }

    pub fn region_paper() -> Self {
        JointSpec::RegionUniform(RegionUniform::paper())
    }

    pub fn constructed(z: DistSpec, w: DistSpec) -> Result<Self> {
        Ok(JointSpec::Constructed(construction::build_pair(z, w)?))
    }

    /// Whether `(X, Y)` and `(Y, X)` have the same law, decided from the spec.
    pub fn is_exchangeable(&self) -> bool {
        match self {
            JointSpec::Product { x, y } => x == y,
            JointSpec::BivariateNormal(_) | JointSpec::Constructed(_) => true,
            JointSpec::DiscreteTable(t) => t.is_symmetric(),
            JointSpec::RegionUniform(r) => r.is_symmetric(),
        }
    }

    /// True when the joint has a pointwise density.
    pub fn has_density(&self) -> bool {
        match self {
            JointSpec::Product { x, y } => {
                x.capabilities().has_density && y.capabilities().has_density
            }
            JointSpec::BivariateNormal(_) | JointSpec::RegionUniform(_) => true,
            JointSpec::DiscreteTable(_) | JointSpec::Constructed(_) => false,
        }
    }

    pub fn joint_density(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            JointSpec::Product { x: dx, y: dy } if self.has_density() => {
                Ok(dx.density(x)? * dy.density(y)?)
            }
            JointSpec::BivariateNormal(b) => Ok(b.density(x, y)),
            JointSpec::RegionUniform(r) => Ok(r.density(x, y)),
            _ => Err(Error::capability(self, "joint density")),
        }
    }

    /// The exact pmf table of a discrete joint.
    pub fn joint_pmf_table(&self) -> Result<&DiscreteTable> {
        match self {
            JointSpec::DiscreteTable(t) => Ok(t),
            _ => Err(Error::capability(self, "pmf table")),
        }
    }

    /// `n` iid pairs.
    pub fn sample_joint(&self, s: &mut RandomStream, n: usize) -> Result<PairSample> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size must be at least 1".into()));
        }
        let provenance = Some(Provenance {
            key: s.key(),
            counter: s.counter(),
            spec: self.to_string(),
        });
        let (xs, ys): (Vec<f64>, Vec<f64>) = match self {
            JointSpec::Product { x, y } => (0..n).map(|_| (x.draw(s), y.draw(s))).unzip(),
            JointSpec::BivariateNormal(b) => {
                (0..n).map(|_| correlated_normals(b.rho, s)).unzip()
            }
            JointSpec::DiscreteTable(t) => {
                let cumulative = t.cumulative();
                (0..n).map(|_| t.sample_pair(&cumulative, s)).unzip()
            }
            JointSpec::RegionUniform(r) => {
                let cumulative = r.cumulative();
                (0..n).map(|_| r.sample_pair(&cumulative, s)).unzip()
            }
            JointSpec::Constructed(pair) => {
                let draws = pair.sample_constructed(s, n)?;
                return Ok(PairSample { provenance, ..draws });
            }
        };
        Ok(PairSample { xs, ys, provenance })
    }
}

fn fmt_list<T: fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

impl fmt::Display for JointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JointSpec::Product { x, y } => write!(f, "product({x}, {y})"),
            JointSpec::BivariateNormal(b) => write!(f, "bivariate-normal({})", b.rho),
            JointSpec::DiscreteTable(t) if *t == DiscreteTable::paper() => {
                write!(f, "discrete-table:paper")
            }
            JointSpec::DiscreteTable(t) => {
                let rows: Vec<String> = t.probs.iter().map(|r| fmt_list(r)).collect();
                write!(
                    f,
                    "discrete-table(x={}, y={}, p=[{}])",
                    fmt_list(&t.xs),
                    fmt_list(&t.ys),
                    rows.join(", ")
                )
            }
            JointSpec::RegionUniform(r) if *r == RegionUniform::paper() => {
                write!(f, "region-uniform:paper")
            }
            JointSpec::RegionUniform(r) => {
                let rects: Vec<String> = r
                    .rects
                    .iter()
                    .map(|q| fmt_list(&[q.x0, q.x1, q.y0, q.y1, q.density]))
                    .collect();
                write!(f, "region-uniform({})", rects.join(", "))
            }
            JointSpec::Constructed(p) => write!(f, "{p}"),
        }
    }
}
