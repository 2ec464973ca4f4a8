use std::f64::consts::PI;

use num_rational::Rational64;
use proptest::prelude::*;
use selfinv::construction::ConstructedPair;
use selfinv::inference::{empirical_cf, iid_decomposability_obstruction, ks_one_sample, linear_grid};
use selfinv::quadrature::integrate_with_breaks;
use selfinv::ratio::{ratio_density, ratio_pmf, reciprocal_cdf, swapped_ratio_density};
use selfinv::{build_pair, new_stream, DiscreteTable, DistSpec, JointSpec, StreamKey};

fn symmetric_table() -> impl Strategy<Value = DiscreteTable> {
    (2usize..5)
        .prop_flat_map(|k| {
            (
                prop::collection::btree_set(1i64..12, k),
                prop::collection::vec(1i64..9, k * (k + 1) / 2),
            )
        })
        .prop_filter("support size", |(s, _)| s.len() >= 2)
        .prop_map(|(support, weights)| {
            let vals: Vec<Rational64> = support.iter().map(|&v| v.into()).collect();
            let k = vals.len();
            let mut w = vec![vec![0i64; k]; k];
            let mut it = weights.into_iter();
            for i in 0..k {
                for j in i..k {
                    let v = it.next().unwrap();
                    w[i][j] = v;
                    w[j][i] = v;
                }
            }
            let total: i64 = w.iter().flatten().sum();
            let probs = w
                .iter()
                .map(|r| r.iter().map(|&v| Rational64::new(v, total)).collect())
                .collect();
            DiscreteTable::new(vals.clone(), vals, probs).unwrap()
        })
}

fn continuous_law() -> impl Strategy<Value = DistSpec> {
    prop_oneof![
        (-2.0..2.0f64, 0.2..3.0f64).prop_map(|(m, s)| DistSpec::normal(m, s).unwrap()),
        (0.2..5.0f64).prop_map(|r| DistSpec::exponential(r).unwrap()),
        Just(DistSpec::laha()),
        Just(DistSpec::standard_cauchy()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stream_replay_is_exact(seed in any::<u64>(), id in any::<u64>(), n in 1usize..200) {
        let d = DistSpec::normal(0.0, 1.0).unwrap();
        let a = d.sample(&mut new_stream(StreamKey::new(seed, id)), n).unwrap();
        let b = d.sample(&mut new_stream(StreamKey::new(seed, id)), n).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.values), bits(&b.values));
    }

    #[test]
    fn neighbouring_streams_differ(seed in any::<u64>(), id in 0u64..u64::MAX) {
        let mut a = new_stream(StreamKey::new(seed, id));
        let mut b = new_stream(StreamKey::new(seed, id + 1));
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        prop_assert_ne!(xs, ys);
    }

    #[test]
    fn symmetric_tables_give_reciprocal_invariant_ratios(t in symmetric_table()) {
        let pmf = ratio_pmf(&t).unwrap();
        prop_assert_eq!(pmf.total(), Rational64::from_integer(1));
        for (q, p) in pmf.iter() {
            prop_assert_eq!(*p, pmf.prob(q.recip()));
        }
    }

    #[test]
    fn product_of_one_law_is_symmetric(d in continuous_law(), x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let j = JointSpec::product(d.clone(), d).unwrap();
        prop_assert_eq!(j.joint_density(x, y).unwrap(), j.joint_density(y, x).unwrap());
    }

    #[test]
    fn exchangeable_joints_have_swap_invariant_ratio_density(
        d in continuous_law(),
        rho in -0.9..0.9f64,
        z in -6.0..6.0f64,
    ) {
        for j in [JointSpec::product(d.clone(), d.clone()).unwrap(), JointSpec::bivariate_normal(rho).unwrap()] {
            let a = ratio_density(&j, z, 1e-9).unwrap().value;
            let b = swapped_ratio_density(&j, z, 1e-9).unwrap().value;
            prop_assert!((a - b).abs() < 1e-8, "{j} at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn weight_cancels_in_the_ratio(seed in any::<u64>(), sigma in 0.1..10.0f64) {
        let unit = ConstructedPair::with_unit_weight(DistSpec::exponential(1.0).unwrap()).unwrap();
        let heavy = build_pair(DistSpec::exponential(1.0).unwrap(), DistSpec::normal(0.0, sigma).unwrap()).unwrap();
        let a = unit.sample_constructed(&mut new_stream(StreamKey::new(seed, 0)), 64).unwrap();
        let b = heavy.sample_constructed(&mut new_stream(StreamKey::new(seed, 0)), 64).unwrap();
        for k in 0..64 {
            let (ra, rb) = (a.xs[k] / a.ys[k], b.xs[k] / b.ys[k]);
            prop_assert!((ra - rb).abs() <= 4.0 * f64::EPSILON * ra.abs());
        }
    }

    #[test]
    fn empirical_cf_is_conjugate_symmetric(
        sample in prop::collection::vec(-1e3..1e3f64, 100..300),
        t in 1e-6..50.0f64,
    ) {
        let c = empirical_cf(&sample, &[-t, 0.0, t]).unwrap();
        prop_assert_eq!(c.values[0], c.values[2].conj());
        prop_assert_eq!(c.values[1].re, 1.0);
        prop_assert_eq!(c.values[1].im, 0.0);
        prop_assert!(c.values[2].norm() <= 1.0 + c.band);
    }

    #[test]
    fn self_inverse_laws_are_reciprocal_fixed_points(z in prop_oneof![-50.0..50.0f64, 1e-3..1e3f64]) {
        for d in [DistSpec::standard_cauchy(), DistSpec::f_ratio(1).unwrap(), DistSpec::f_ratio(5).unwrap(), DistSpec::log_uniform()] {
            prop_assert!((reciprocal_cdf(&d, z) - d.cdf(z)).abs() < 1e-8, "{d} at {z}");
        }
    }
}

#[test]
fn ratio_densities_have_unit_mass() {
    let normal = DistSpec::normal(0.0, 1.0).unwrap();
    let exp = DistSpec::exponential(1.0).unwrap();
    let joints = [
        JointSpec::product(normal.clone(), normal).unwrap(),
        JointSpec::product(exp.clone(), exp).unwrap(),
        JointSpec::product(DistSpec::laha(), DistSpec::laha()).unwrap(),
        JointSpec::bivariate_normal(0.5).unwrap(),
        JointSpec::region_paper(),
    ];
    for j in joints {
        let f = |z: f64| ratio_density(&j, z, 1e-10).unwrap().value;
        let breaks = [-1.0, 0.0, 0.5, 1.0, 2.0];
        let mass = integrate_with_breaks(f, f64::NEG_INFINITY, f64::INFINITY, &breaks, 1e-8).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-5, "{j}: {}", mass.value);
    }
}

#[test]
fn standard_normal_ratio_matches_cauchy_density() {
    let n = DistSpec::normal(0.0, 1.0).unwrap();
    let j = JointSpec::product(n.clone(), n).unwrap();
    for z in [-7.5, -1.0, 0.0, 0.3, 2.0, 40.0] {
        let f = ratio_density(&j, z, 1e-10).unwrap().value;
        assert!((f - 1.0 / (PI * (1.0 + z * z))).abs() < 1e-9, "z = {z}");
    }
}

#[test]
fn samplers_agree_with_their_cdfs() {
    let laws = [
        DistSpec::standard_cauchy(),
        DistSpec::cauchy(1.0, 2.0).unwrap(),
        DistSpec::corr_normal_ratio(0.5).unwrap(),
        DistSpec::f_ratio(1).unwrap(),
        DistSpec::f_ratio(4).unwrap(),
        DistSpec::laha(),
        DistSpec::log_uniform(),
        DistSpec::exponential(2.0).unwrap(),
        DistSpec::normal(-1.0, 0.5).unwrap(),
    ];
    for (k, d) in laws.iter().enumerate() {
        let s = d.sample(&mut new_stream(StreamKey::new(31, k as u64)), 20_000).unwrap();
        let r = ks_one_sample(&s.values, |x| d.cdf(x), 0.01).unwrap();
        assert!(r.passed(), "{d}: p = {:?}", r.p_value);
    }
}

#[test]
fn region_marginals_are_uniform_on_0_3() {
    let p = JointSpec::region_paper()
        .sample_joint(&mut new_stream(StreamKey::new(32, 0)), 100_000)
        .unwrap();
    let u03 = |x: f64| (x / 3.0).clamp(0.0, 1.0);
    assert!(ks_one_sample(&p.xs, u03, 0.01).unwrap().passed());
    assert!(ks_one_sample(&p.ys, u03, 0.01).unwrap().passed());
}

#[test]
fn iid_log_differences_never_show_a_witness() {
    let laws = [
        DistSpec::normal(0.0, 1.0).unwrap(),
        DistSpec::exponential(1.0).unwrap(),
        DistSpec::laha(),
        DistSpec::standard_cauchy(),
        DistSpec::log_uniform(),
    ];
    let grid = linear_grid(0.0, 10.0, 200);
    for (k, d) in laws.iter().enumerate() {
        let mut s = new_stream(StreamKey::new(33, k as u64));
        let x = d.sample(&mut s, 20_000).unwrap();
        let y = d.sample(&mut s, 20_000).unwrap();
        let diff: Vec<f64> = x.values.iter().zip(&y.values).map(|(a, b)| a.abs().ln() - b.abs().ln()).collect();
        let r = iid_decomposability_obstruction(&empirical_cf(&diff, &grid).unwrap(), 0.01).unwrap();
        assert!(r.passed(), "{d}: {:?}", r.diagnostics);
    }
}
