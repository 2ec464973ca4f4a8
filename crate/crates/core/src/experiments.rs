//! Named experiments: each checks stated values against computed or estimated ones.
//!
//! A report lists its claims (stated value, computed value, tolerance, verdict)
//! and CSV detail tables. Experiment `k` of [`EXPERIMENTS`] draws from stream
//! ids `base + STREAM_BLOCK * k ..`, so experiments never share a stream.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::construction::{build_pair, exchangeability_certificate};
use crate::dist::DistSpec;
use crate::error::{Error, Result};
use crate::inference::{
    analytic_log_cf, empirical_cf, exact_symmetry_check, iid_decomposability_obstruction,
    ks_one_sample, ks_two_sample, linear_grid, log_abs, log_symmetry_test, self_inverse_test,
    Grid, Subject, TestReport,
};
use crate::io::{format_float, write_table};
use crate::joint::{DiscreteTable, JointSpec};
use crate::ratio::{mixture_cdf, ratio_density, ratio_pmf, ratio_sample, swapped_ratio_sample};
use crate::rng::{new_stream, RandomStream, StreamKey};

pub const EXPERIMENTS: [&str; 8] = [
    "discrete-table",
    "shifted-uniform",
    "laha-cauchy",
    "corr-cauchy",
    "prop2-roundtrip",
    "prop2-nonselfinverse",
    "cf-witness",
    "fnn-selfinverse",
];

/// Stream ids reserved per experiment.
pub const STREAM_BLOCK: u64 = 64;
/// Significance level for claims that a test must reject.
pub const STRICT_ALPHA: f64 = 0.001;
pub const MIN_N: usize = 1000;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DENSITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Sample size; `None` uses each experiment's default.
    pub n: Option<usize>,
    pub alpha: f64,
    /// First stream id.
    pub stream_base: u64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(name: &str) -> Self {
        ExperimentConfig {
            name: name.to_string(),
            seed: 1,
            n: None,
            alpha: 0.01,
            stream_base: 0,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.name.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown experiment '{}'; expected one of {}",
                self.name,
                EXPERIMENTS.join(", ")
            )));
        }
        if let Some(n) = self.n {
            if n < MIN_N {
                return Err(Error::domain("n", n, ">= 1000"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.1) {
            return Err(Error::domain("alpha", self.alpha, "(0, 0.1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub label: String,
    pub stated: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub stream_base: u64,
    pub streams: u64,
    pub n: usize,
    pub alpha: f64,
    pub specs: Vec<String>,
    pub claims: Vec<Claim>,
    pub tests: Vec<TestReport>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub table_files: Vec<String>,
    pub passed: bool,
}

/// Collects claims and hands out consecutive streams.
struct Run {
    seed: u64,
    base: u64,
    next: u64,
    alpha: f64,
    claims: Vec<Claim>,
    tests: Vec<TestReport>,
    tables: Vec<Table>,
    specs: Vec<String>,
}

impl Run {
    fn stream(&mut self) -> RandomStream {
        let s = new_stream(StreamKey::new(self.seed, self.base + self.next));
        self.next += 1;
        s
    }

    fn spec(&mut self, s: impl ToString) {
        self.specs.push(s.to_string());
    }

    fn claim(&mut self, label: &str, stated: impl ToString, computed: impl ToString, tolerance: &str, pass: bool) {
        self.claims.push(Claim {
            label: label.into(),
            stated: stated.to_string(),
            computed: computed.to_string(),
            tolerance: tolerance.into(),
            pass,
        });
    }

    fn close(&mut self, label: &str, stated: f64, computed: f64, tol: f64) {
        let pass = (computed - stated).abs() <= tol;
        self.claim(label, format_float(stated), format_float(computed), &format!("±{}", format_float(tol)), pass);
    }

    /// Records a test that must come out as `want`.
    fn expect(&mut self, label: &str, report: TestReport, want_pass: bool) {
        let got = if report.passed() { "pass" } else { "reject" };
        let want = if want_pass { "pass" } else { "reject" };
        let p = report.p_value.map_or("exact".to_string(), format_float);
        self.claim(
            label,
            want,
            format!("{got} (p = {p})"),
            &format!("alpha = {}", report.alpha),
            report.passed() == want_pass,
        );
        self.tests.push(report.with("label", label));
    }

    fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        self.tables.push(Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows,
        });
    }
}

fn frac(r: Rational64) -> String {
    r.to_string()
}

fn over36(r: Rational64) -> String {
    let scaled = r * Rational64::from_integer(36);
    if scaled.is_integer() {
        format!("{}/36", scaled.numer())
    } else {
        r.to_string()
    }
}

fn discrete_table(run: &mut Run) -> Result<()> {
    let table = DiscreteTable::paper();
    run.spec("discrete-table:paper");
    let pmf = ratio_pmf(&table)?;
    let recip = pmf.reciprocal()?;
    let two = Rational64::from_integer(2);
    let (p, q) = (pmf.prob(two), recip.prob(two));
    run.claim("Pr[X/Y = 2]", "1/36", over36(p), "exact", p == Rational64::new(1, 36));
    run.claim("Pr[Y/X = 2]", "9/36", over36(q), "exact", q == Rational64::new(9, 36));
    run.claim("pmf total", "1", frac(pmf.total()), "exact", pmf.total() == Rational64::from_integer(1));
    let mut keys: Vec<Rational64> = pmf.iter().map(|(k, _)| *k).chain(recip.iter().map(|(k, _)| *k)).collect();
    keys.sort();
    keys.dedup();
    let rows = keys
        .iter()
        .map(|&k| vec![frac(k), over36(pmf.prob(k)), over36(recip.prob(k))])
        .collect();
    run.table("pmf", &["ratio", "pr_x_over_y", "pr_y_over_x"], rows);
    let exact = exact_symmetry_check(&table, run.alpha)?;
    run.expect("(X, Y) exchangeable", exact, false);
    Ok(())
}

fn shifted_uniform(run: &mut Run, n: usize) -> Result<()> {
    let joint = JointSpec::region_paper();
    run.spec(&joint);
    let direct = ratio_sample(&joint, &mut run.stream(), n)?.values;
    let swapped = swapped_ratio_sample(&joint, &mut run.stream(), n)?.values;
    let frac_le = |v: &[f64], z: f64| v.iter().filter(|&&r| r <= z).count() as f64 / v.len() as f64;
    // 3 sigma binomial band, never tighter than the stated ±0.005
    let band = |p: f64| (3.0 * (p * (1.0 - p) / n as f64).sqrt()).max(0.005);
    run.close("Pr[X/Y <= 1]", 2.0 / 3.0, frac_le(&direct, 1.0), band(2.0 / 3.0));
    run.close("Pr[Y/X <= 1]", 1.0 / 3.0, frac_le(&swapped, 1.0), band(1.0 / 3.0));
    let rows = linear_grid(0.0, 4.0, 40)
        .into_iter()
        .map(|z| vec![format_float(z), format_float(frac_le(&direct, z)), format_float(frac_le(&swapped, z))])
        .collect();
    run.table("ecdf", &["z", "x_over_y", "y_over_x"], rows);
    let report = self_inverse_test(Subject::Sample(&direct), STRICT_ALPHA, 1.0)?;
    run.expect("X/Y self-inverse", report, false);
    Ok(())
}

fn laha_cauchy(run: &mut Run, n: usize) -> Result<()> {
    let laha = DistSpec::laha();
    let joint = JointSpec::product(laha, laha)?;
    run.spec(&joint);
    let cauchy = DistSpec::standard_cauchy();
    let ratios = ratio_sample(&joint, &mut run.stream(), n)?;
    let ks = ks_one_sample(&ratios.values, |x| cauchy.cdf(x), run.alpha)?;
    run.expect("X/Y ~ standard Cauchy (KS)", ks, true);
    let at0 = ratio_density(&joint, 0.0, DENSITY_TOL)?.value;
    run.close("ratio density at 0", 1.0 / PI, at0, 1e-5);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for z in linear_grid(-5.0, 5.0, 20) {
        let f = ratio_density(&joint, z, DENSITY_TOL)?.value;
        let c = cauchy.density(z)?;
        worst = worst.max((f - c).abs());
        rows.push(vec![format_float(z), format_float(f), format_float(c)]);
    }
    run.close("max |ratio density - Cauchy density| on [-5, 5]", 0.0, worst, 1e-5);
    run.table("density", &["z", "ratio_density", "cauchy_density"], rows);
    Ok(())
}

fn corr_cauchy(run: &mut Run, n: usize) -> Result<()> {
    let mut rows = Vec::new();
    for rho in [0.5, 0.0] {
        let joint = JointSpec::bivariate_normal(rho)?;
        let closed = DistSpec::corr_normal_ratio(rho)?;
        run.spec(&joint);
        let mut worst: f64 = 0.0;
        for z in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
            let f = ratio_density(&joint, z, DENSITY_TOL)?.value;
            let c = closed.density(z)?;
            worst = worst.max((f - c).abs());
            rows.push(vec![format_float(rho), format_float(z), format_float(f), format_float(c)]);
        }
        run.close(&format!("rho = {rho}: max |quadrature - closed form|"), 0.0, worst, 1e-6);
        let ratios = ratio_sample(&joint, &mut run.stream(), n)?;
        let ks = ks_one_sample(&ratios.values, |x| closed.cdf(x), run.alpha)?;
        run.expect(&format!("rho = {rho}: X/Y ~ {closed} (KS)"), ks, true);
    }
    run.table("density", &["rho", "z", "quadrature", "closed_form"], rows);
    Ok(())
}

fn prop2_roundtrip(run: &mut Run, n: usize) -> Result<()> {
    let z = DistSpec::log_uniform();
    let unit = DistSpec::constant(1.0)?;
    let joint = JointSpec::Constructed(build_pair(z, unit)?);
    run.spec(&joint);
    let ratios = ratio_sample(&joint, &mut run.stream(), n)?;
    let ks = ks_one_sample(&ratios.values, |x| z.cdf(x), run.alpha)?;
    run.expect("X/Y ~ log-uniform (KS vs CDF)", ks, true);
    let direct = z.sample(&mut run.stream(), n)?;
    let two = ks_two_sample(&ratios.values, &direct.values, run.alpha)?;
    run.expect("X/Y ~ log-uniform (two-sample KS)", two, true);
    let mixture: Vec<f64> = {
        let mut s = run.stream();
        (0..n)
            .map(|_| {
                let v = z.draw(&mut s);
                if s.bernoulli_half() == 1 { v } else { 1.0 / v }
            })
            .collect()
    };
    let mix = ks_two_sample(&ratios.values, &mixture, run.alpha)?;
    run.expect("X/Y ~ mixture of Z and 1/Z (two-sample KS)", mix, true);
    let cert = exchangeability_certificate(&joint, &mut run.stream(), n.max(100_000), &Grid::Quantiles(6), run.alpha)?;
    run.expect("(X, Y) exchangeable (Bowker, 6x6)", cert, true);
    let gauss = JointSpec::constructed(z, DistSpec::normal(0.0, 1.0)?)?;
    run.spec(&gauss);
    let g = ratio_sample(&gauss, &mut run.stream(), n)?;
    let ks = ks_one_sample(&g.values, |x| z.cdf(x), run.alpha)?;
    run.expect("W ~ N(0,1): X/Y ~ log-uniform (KS)", ks, true);
    let rows = linear_grid(0.4, 2.8, 24)
        .into_iter()
        .map(|t| {
            let e = ratios.values.iter().filter(|&&r| r <= t).count() as f64 / n as f64;
            vec![format_float(t), format_float(e), format_float(z.cdf(t))]
        })
        .collect();
    run.table("ecdf", &["z", "ratio_ecdf", "log_uniform_cdf"], rows);
    Ok(())
}

fn prop2_nonselfinverse(run: &mut Run, n: usize) -> Result<()> {
    let z = DistSpec::exponential(1.0)?;
    let joint = JointSpec::constructed(z, DistSpec::constant(1.0)?)?;
    run.spec(&joint);
    let ratios = ratio_sample(&joint, &mut run.stream(), n)?;
    let mix = ks_one_sample(&ratios.values, |x| mixture_cdf(&z, x), run.alpha)?;
    run.expect("X/Y ~ mixture law (KS)", mix, true);
    let unmixed = ks_one_sample(&ratios.values, |x| z.cdf(x), STRICT_ALPHA)?;
    run.expect("X/Y ~ exponential(1) (KS)", unmixed, false);
    let direct = z.sample(&mut run.stream(), n)?;
    let si = self_inverse_test(Subject::Sample(&direct.values), STRICT_ALPHA, 1.0)?;
    run.expect("exponential(1) self-inverse", si, false);
    let rows = linear_grid(0.0, 4.0, 40)
        .into_iter()
        .map(|t| {
            let e = ratios.values.iter().filter(|&&r| r <= t).count() as f64 / n as f64;
            vec![format_float(t), format_float(e), format_float(mixture_cdf(&z, t)), format_float(z.cdf(t))]
        })
        .collect();
    run.table("ecdf", &["z", "ratio_ecdf", "mixture_cdf", "exponential_cdf"], rows);
    Ok(())
}

fn witness_of(report: &TestReport) -> (f64, f64) {
    let get = |k: &str| report.diagnostics.get(k).and_then(Value::as_f64).unwrap_or(f64::NAN);
    (get("witness"), get("margin"))
}

fn cf_witness(run: &mut Run, n: usize) -> Result<()> {
    let grid = linear_grid(0.0, 10.0, 1000);
    let lu = DistSpec::log_uniform();
    let lr = DistSpec::log_rademacher();
    run.spec(lu);
    run.spec(lr);
    let r_lu = iid_decomposability_obstruction(&analytic_log_cf(&lu, &grid)?, run.alpha)?;
    let r_lr = iid_decomposability_obstruction(&analytic_log_cf(&lr, &grid)?, run.alpha)?;
    let (t_lu, m_lu) = witness_of(&r_lu);
    let (t_lr, m_lr) = witness_of(&r_lr);
    run.claim("log-uniform: cf of log Z takes negative values", "yes", if r_lu.rejected() { "yes" } else { "no" }, "exact", r_lu.rejected());
    run.close("log-uniform: witness t", 1.5 * PI, t_lu, 0.05);
    run.close("log-uniform: margin", 0.2122, m_lu, 0.001);
    run.close("log-rademacher: witness t", PI, t_lr, 1e-6);
    run.close("log-rademacher: margin", 1.0, m_lr, 1e-9);
    run.tests.push(r_lu.with("label", "log-uniform analytic"));
    run.tests.push(r_lr.with("label", "log-rademacher analytic"));

    let cauchy = DistSpec::standard_cauchy();
    run.spec(cauchy);
    let z = cauchy.sample(&mut run.stream(), n)?;
    let curve = empirical_cf(&log_abs(&z.values)?, &linear_grid(0.0, 10.0, 200))?;
    let rows = curve
        .t_grid
        .iter()
        .zip(&curve.values)
        .map(|(&t, v)| {
            let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
            vec![format_float(t), format_float(v.re), format_float(v.im), format_float(curve.band), format_float(sinc), format_float(t.cos())]
        })
        .collect();
    let emp = iid_decomposability_obstruction(&curve, run.alpha)?;
    run.expect("log|Cauchy|: no obstruction witness", emp, true);
    run.table(
        "cf",
        &["t", "cauchy_log_abs_re", "cauchy_log_abs_im", "band", "log_uniform_cf", "log_rademacher_cf"],
        rows,
    );
    Ok(())
}

fn fnn_selfinverse(run: &mut Run, n: usize) -> Result<()> {
    let mut rows = Vec::new();
    for dof in [1u32, 4, 10] {
        let f = DistSpec::f_ratio(dof)?;
        run.spec(f);
        let mut worst: f64 = 0.0;
        for x in linear_grid(0.1, 5.0, 49) {
            // F(x) + F(1/x) = 1 for a continuous self-inverse law on (0, ∞)
            let gap = f.cdf(x) + f.cdf(1.0 / x) - 1.0;
            worst = worst.max(gap.abs());
            rows.push(vec![dof.to_string(), format_float(x), format_float(f.cdf(x)), format_float(1.0 - f.cdf(1.0 / x))]);
        }
        run.close(&format!("F({dof},{dof}): max |F(x) + F(1/x) - 1|"), 0.0, worst, 1e-12);
        let si = self_inverse_test(Subject::Dist { spec: &f, n, stream: &mut run.stream() }, run.alpha, 1.0)?;
        run.expect(&format!("F({dof},{dof}) self-inverse"), si, true);
        let s = f.sample(&mut run.stream(), n)?;
        let ls = log_symmetry_test(&s.values, run.alpha)?;
        run.expect(&format!("F({dof},{dof}) log-symmetric"), ls, true);
    }
    run.table("cdf", &["n", "x", "cdf_x", "one_minus_cdf_inv_x"], rows);
    Ok(())
}

fn default_n(name: &str) -> usize {
    match name {
        "shifted-uniform" | "cf-witness" => 100_000,
        _ => 20_000,
    }
}

/// Runs one experiment; its streams start at `stream_base + STREAM_BLOCK * index`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let index = EXPERIMENTS.iter().position(|&e| e == config.name).expect("validated") as u64;
    let base = config.stream_base + STREAM_BLOCK * index;
    let n = config.n.unwrap_or_else(|| default_n(&config.name));
    let mut run = Run {
        seed: config.seed,
        base,
        next: 0,
        alpha: config.alpha,
        claims: Vec::new(),
        tests: Vec::new(),
        tables: Vec::new(),
        specs: Vec::new(),
    };
    match config.name.as_str() {
        "discrete-table" => discrete_table(&mut run)?,
        "shifted-uniform" => shifted_uniform(&mut run, n)?,
        "laha-cauchy" => laha_cauchy(&mut run, n)?,
        "corr-cauchy" => corr_cauchy(&mut run, n)?,
        "prop2-roundtrip" => prop2_roundtrip(&mut run, n)?,
        "prop2-nonselfinverse" => prop2_nonselfinverse(&mut run, n)?,
        "cf-witness" => cf_witness(&mut run, n)?,
        "fnn-selfinverse" => fnn_selfinverse(&mut run, n)?,
        _ => unreachable!("validated"),
    }
    let passed = run.claims.iter().all(|c| c.pass);
    let table_files = run
        .tables
        .iter()
        .map(|t| format!("{}-{}.csv", config.name, t.name))
        .collect();
    Ok(ExperimentReport {
        name: config.name.clone(),
        version: VERSION.to_string(),
        seed: config.seed,
        stream_base: base,
        streams: run.next,
        n,
        alpha: config.alpha,
        specs: run.specs,
        claims: run.claims,
        tests: run.tests,
        tables: run.tables,
        table_files,
        passed,
    })
}

/// Runs every experiment concurrently; reports come back in [`EXPERIMENTS`] order.
pub fn run_all(template: &ExperimentConfig) -> Vec<(String, Result<ExperimentReport>)> {
    EXPERIMENTS
        .par_iter()
        .map(|&name| {
            let config = ExperimentConfig { name: name.to_string(), ..template.clone() };
            (name.to_string(), run_experiment(&config))
        })
        .collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let io = |e: std::io::Error| Error::Input(format!("{}: {e}", path.display()));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Writes `<name>.json` and one `<name>-<table>.csv` per table into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    for (table, file) in report.tables.iter().zip(&report.table_files) {
        let mut buf = Vec::new();
        let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
        write_table(&mut buf, &header, &table.rows)?;
        write_atomic(&dir.join(file), &buf)?;
    }
    let json = serde_json::to_string_pretty(report).expect("report is serializable");
    write_atomic(&dir.join(format!("{}.json", report.name)), json.as_bytes())
}
