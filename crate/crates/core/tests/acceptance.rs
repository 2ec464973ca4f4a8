//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed; the process
//! exits nonzero if any criterion fails. Closed forms used as oracles are
//! written out here rather than taken from the library.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_rational::Rational64;
use selfinv::inference::{
    analytic_log_cf, empirical_cf, exact_symmetry_check, exchangeability_test,
    iid_decomposability_obstruction, ks_one_sample, ks_two_sample, linear_grid, log_abs,
    null_rejection_rate, self_inverse_test, Grid, Subject,
};
use selfinv::ratio::{ratio_density, ratio_pmf, ratio_sample, swapped_ratio_sample};
use selfinv::{build_pair, new_stream, DiscreteTable, DistSpec, JointSpec, StreamKey};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.is_ok());
    let text: Vec<String> = parts
        .into_iter()
        .map(|p| match p {
            Ok(s) => s,
            Err(s) => format!("[failed] {s}"),
        })
        .collect();
    check(ok, text.join("; "))
}

fn stream(seed: u64, id: u64) -> selfinv::RandomStream {
    new_stream(StreamKey::new(seed, id))
}

fn unit() -> DistSpec {
    DistSpec::constant(1.0).unwrap()
}

fn c1_exact_counterexample() -> Outcome {
    let pmf = ratio_pmf(&DiscreteTable::paper()).map_err(|e| e.to_string())?;
    let recip = pmf.reciprocal().map_err(|e| e.to_string())?;
    let two = Rational64::from_integer(2);
    let (p, q) = (pmf.prob(two), recip.prob(two));
    check(
        p == Rational64::new(1, 36) && q == Rational64::new(9, 36),
        format!("Pr[X/Y=2] = {p}, Pr[Y/X=2] = {q} (want 1/36, 1/4)"),
    )
}

fn c2_monte_carlo_counterexample() -> Outcome {
    let j = JointSpec::region_paper();
    let n = 100_000;
    let direct = ratio_sample(&j, &mut stream(2, 0), n).map_err(|e| e.to_string())?;
    let swapped = swapped_ratio_sample(&j, &mut stream(2, 1), n).map_err(|e| e.to_string())?;
    let le1 = |v: &[f64]| v.iter().filter(|&&r| r <= 1.0).count() as f64 / v.len() as f64;
    let (a, b) = (le1(&direct.values), le1(&swapped.values));
    check(
        (a - 2.0 / 3.0).abs() <= 0.005 && (b - 1.0 / 3.0).abs() <= 0.005,
        format!("Pr[X/Y<=1] = {a:.5}, Pr[Y/X<=1] = {b:.5} (want 2/3, 1/3 within 0.005)"),
    )
}

fn c3_ratio_density_oracle() -> Outcome {
    let closed = |rho: f64, z: f64| {
        let s2 = 1.0 - rho * rho;
        s2.sqrt() / (PI * (s2 + (z - rho) * (z - rho)))
    };
    let cauchy = |z: f64| 1.0 / (PI * (1.0 + z * z));
    let mut worst_05: f64 = 0.0;
    let mut worst_0: f64 = 0.0;
    let j05 = JointSpec::bivariate_normal(0.5).unwrap();
    let j0 = JointSpec::bivariate_normal(0.0).unwrap();
    for z in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
        let f = ratio_density(&j05, z, 1e-9).map_err(|e| e.to_string())?.value;
        worst_05 = worst_05.max((f - closed(0.5, z)).abs());
        let g = ratio_density(&j0, z, 1e-9).map_err(|e| e.to_string())?.value;
        worst_0 = worst_0.max((g - cauchy(z)).abs());
    }
    check(
        worst_05 < 1e-6 && worst_0 < 1e-6,
        format!("max error rho=0.5: {worst_05:.2e}, rho=0: {worst_0:.2e} (tol 1e-6)"),
    )
}

fn c4_laha() -> Outcome {
    let laha = DistSpec::laha();
    let j = JointSpec::product(laha, laha).unwrap();
    let r = ratio_sample(&j, &mut stream(4, 0), 20_000).map_err(|e| e.to_string())?;
    let cauchy_cdf = |x: f64| 0.5 + x.atan() / PI;
    let ks = ks_one_sample(&r.values, cauchy_cdf, 0.01).map_err(|e| e.to_string())?;
    let at0 = ratio_density(&j, 0.0, 1e-9).map_err(|e| e.to_string())?.value;
    all(vec![
        check(ks.passed(), format!("KS vs Cauchy p = {:.4}", ks.p_value.unwrap())),
        check((at0 - 1.0 / PI).abs() < 1e-5, format!("f(0) - 1/pi = {:.2e}", at0 - 1.0 / PI)),
    ])
}

fn c5_exchangeable_ratios() -> Outcome {
    let normal = DistSpec::normal(0.0, 1.0).unwrap();
    let joints = [
        JointSpec::product(normal, normal).unwrap(),
        JointSpec::bivariate_normal(0.5).unwrap(),
        JointSpec::constructed(DistSpec::log_uniform(), unit()).unwrap(),
    ];
    let parts = joints
        .iter()
        .enumerate()
        .map(|(k, j)| {
            let k = k as u64;
            let a = ratio_sample(j, &mut stream(5, 2 * k), 20_000).map_err(|e| e.to_string())?;
            let b = swapped_ratio_sample(j, &mut stream(5, 2 * k + 1), 20_000).map_err(|e| e.to_string())?;
            let r = ks_two_sample(&a.values, &b.values, 0.01).map_err(|e| e.to_string())?;
            check(r.passed(), format!("{j}: p = {:.4}", r.p_value.unwrap()))
        })
        .collect();
    all(parts)
}

fn c6_construction_roundtrip() -> Outcome {
    let lu = JointSpec::Constructed(build_pair(DistSpec::log_uniform(), unit()).unwrap());
    let r = ratio_sample(&lu, &mut stream(6, 0), 20_000).map_err(|e| e.to_string())?;
    let lu_cdf = |x: f64| if x <= 0.0 { 0.0 } else { ((x.ln() + 1.0) / 2.0).clamp(0.0, 1.0) };
    let a = ks_one_sample(&r.values, lu_cdf, 0.01).map_err(|e| e.to_string())?;

    let ex = JointSpec::Constructed(build_pair(DistSpec::exponential(1.0).unwrap(), unit()).unwrap());
    let r = ratio_sample(&ex, &mut stream(6, 1), 20_000).map_err(|e| e.to_string())?;
    // ½ Pr[Z <= x] + ½ Pr[1/Z <= x] for Z ~ Exp(1)
    let mix = |x: f64| if x <= 0.0 { 0.0 } else { 0.5 * (1.0 - (-x).exp()) + 0.5 * (-1.0 / x).exp() };
    let exp_cdf = |x: f64| if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() };
    let b = ks_one_sample(&r.values, mix, 0.01).map_err(|e| e.to_string())?;
    let c = ks_one_sample(&r.values, exp_cdf, 0.001).map_err(|e| e.to_string())?;
    all(vec![
        check(a.passed(), format!("log-uniform pass p = {:.4}", a.p_value.unwrap())),
        check(b.passed(), format!("exponential vs mixture pass p = {:.4}", b.p_value.unwrap())),
        check(c.rejected(), format!("exponential vs unmixed reject p = {:.2e}", c.p_value.unwrap())),
    ])
}

fn c7_cf_obstruction() -> Outcome {
    let grid = linear_grid(0.0, 10.0, 1000);
    let get = |r: &selfinv::inference::TestReport, k: &str| r.diagnostics[k].as_f64().unwrap_or(f64::NAN);
    let lu = iid_decomposability_obstruction(&analytic_log_cf(&DistSpec::log_uniform(), &grid).unwrap(), 0.01)
        .map_err(|e| e.to_string())?;
    let lr = iid_decomposability_obstruction(&analytic_log_cf(&DistSpec::log_rademacher(), &grid).unwrap(), 0.01)
        .map_err(|e| e.to_string())?;
    let z = DistSpec::standard_cauchy().sample(&mut stream(7, 0), 100_000).map_err(|e| e.to_string())?;
    let curve = empirical_cf(&log_abs(&z.values).unwrap(), &linear_grid(0.0, 10.0, 200)).map_err(|e| e.to_string())?;
    let emp = iid_decomposability_obstruction(&curve, 0.01).map_err(|e| e.to_string())?;
    let (t1, m1) = (get(&lu, "witness"), get(&lu, "margin"));
    let (t2, m2) = (get(&lr, "witness"), get(&lr, "margin"));
    all(vec![
        check(
            lu.rejected() && (t1 - 1.5 * PI).abs() < 0.05 && (m1 - 0.2122).abs() <= 0.001,
            format!("log-uniform t = {t1:.4}, margin = {m1:.4}"),
        ),
        check(
            lr.rejected() && (t2 - PI).abs() < 1e-6 && (m2 - 1.0).abs() < 1e-9,
            format!("log-rademacher t = {t2:.6}, margin = {m2:.4}"),
        ),
        check(emp.passed(), "log|Cauchy| n=1e5: no witness".to_string()),
    ])
}

fn c8_confusion_matrix() -> Outcome {
    let mut parts = Vec::new();
    let mut id = 0;
    let mut next = || {
        id += 1;
        stream(8, id)
    };
    let positives = [
        DistSpec::standard_cauchy(),
        DistSpec::f_ratio(4).unwrap(),
        DistSpec::log_uniform(),
        DistSpec::log_rademacher(),
    ];
    for d in positives {
        let r = self_inverse_test(Subject::Dist { spec: &d, n: 20_000, stream: &mut next() }, 0.01, 1.0)
            .map_err(|e| e.to_string())?;
        parts.push(check(r.passed(), format!("{d} pass")));
    }
    for z in [DistSpec::log_uniform(), DistSpec::exponential(1.0).unwrap()] {
        let j = JointSpec::constructed(z, unit()).unwrap();
        let r = self_inverse_test(Subject::Ratio { joint: &j, n: 20_000, stream: &mut next() }, 0.01, 1.0)
            .map_err(|e| e.to_string())?;
        parts.push(check(r.passed(), format!("ratio of {j} pass")));
    }
    let negatives = [DistSpec::exponential(1.0).unwrap(), DistSpec::cauchy(1.0, 1.0).unwrap()];
    for d in negatives {
        let r = self_inverse_test(Subject::Dist { spec: &d, n: 10_000, stream: &mut next() }, 0.001, 1.0)
            .map_err(|e| e.to_string())?;
        parts.push(check(r.rejected(), format!("{d} reject")));
    }
    let j = JointSpec::region_paper();
    let r = self_inverse_test(Subject::Ratio { joint: &j, n: 10_000, stream: &mut next() }, 0.001, 1.0)
        .map_err(|e| e.to_string())?;
    parts.push(check(r.rejected(), format!("ratio of {j} reject")));
    let wrong = parts.iter().filter(|p| p.is_err()).count();
    let out = all(parts);
    match out {
        Ok(_) => Ok(format!("9 labelled cases, {wrong} misclassified")),
        Err(s) => Err(format!("{wrong} misclassified: {s}")),
    }
}

fn c9_exchangeability() -> Outcome {
    let exact = exact_symmetry_check(&DiscreteTable::paper(), 0.01).map_err(|e| e.to_string())?;
    let d = &exact.diagnostics;
    let witness_ok = exact.rejected()
        && d["witness_cell"] == serde_json::json!(["1", "2"])
        && d["witness_prob"] == "9/36"
        && d["mirror_prob"] == "1/36";
    let normal = DistSpec::normal(0.0, 1.0).unwrap();
    let iid = JointSpec::product(normal, normal).unwrap().sample_joint(&mut stream(9, 0), 100_000).unwrap();
    let a = exchangeability_test(&iid, &Grid::Quantiles(6), 0.01).map_err(|e| e.to_string())?;
    let region = JointSpec::region_paper().sample_joint(&mut stream(9, 1), 100_000).unwrap();
    let b = exchangeability_test(&region, &Grid::Edges(vec![0.0, 1.0, 2.0, 3.0]), 0.001).map_err(|e| e.to_string())?;
    all(vec![
        check(witness_ok, "table: exact reject, witness (1,2)/(2,1) = 9/36 vs 1/36".into()),
        check(a.passed(), format!("iid normals 6x6: p = {:.4}", a.p_value.unwrap())),
        check(b.rejected(), format!("region 3x3: p = {:.2e}", b.p_value.unwrap())),
    ])
}

fn c10_calibration() -> Outcome {
    let rate = null_rejection_rate(1000, 10_000, 0.01, 10).map_err(|e| e.to_string())?;
    check(
        (0.003..=0.025).contains(&rate),
        format!("null rejection rate {:.1}% over 1000 trials (want 0.3%..2.5%)", rate * 100.0),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact discrete counterexample", c1_exact_counterexample),
        ("Monte Carlo region counterexample", c2_monte_carlo_counterexample),
        ("ratio density vs closed form", c3_ratio_density_oracle),
        ("Laha ratio is Cauchy", c4_laha),
        ("exchangeable joints give X/Y =d Y/X", c5_exchangeable_ratios),
        ("construction roundtrip", c6_construction_roundtrip),
        ("characteristic function obstruction", c7_cf_obstruction),
        ("self-inverse confusion matrix", c8_confusion_matrix),
        ("exchangeability tests", c9_exchangeability),
        ("KS calibration", c10_calibration),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
