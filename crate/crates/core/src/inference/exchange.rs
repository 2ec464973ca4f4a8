//! Symmetry of a joint law: Bowker's test on binned pairs, and an exact check for tables.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Signed;
use serde_json::json;

use crate::error::{Error, Result};
use crate::inference::ks::check_alpha;
use crate::inference::report::TestReport;
use crate::joint::DiscreteTable;
use crate::sample::PairSample;
use crate::special::gamma_ur;

/// Minimum `n_ij + n_ji` before bins get merged.
pub const MIN_PAIR_COUNT: u64 = 5;

/// Square binning shared by both axes.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    /// Increasing bin edges `e_0 < … < e_k`; values outside `[e_0, e_k]` land in the end bins.
    Edges(Vec<f64>),
    /// `k` bins at the pooled quantiles of both coordinates.
    Quantiles(usize),
}

impl Grid {
    /// Interior cut points for these pairs.
    fn cuts(&self, pairs: &PairSample) -> Result<Vec<f64>> {
        match self {
            Grid::Edges(edges) => {
                if edges.len() < 3 {
                    return Err(Error::DegenerateGrid(format!(
                        "{} edges give fewer than 2 bins",
                        edges.len()
                    )));
                }
                if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidArgument("grid edges must be finite and increasing".into()));
                }
                Ok(edges[1..edges.len() - 1].to_vec())
            }
            Grid::Quantiles(k) => {
                if *k < 2 {
                    return Err(Error::DegenerateGrid(format!("{k} bins per axis")));
                }
                let mut pooled: Vec<f64> = pairs.xs.iter().chain(&pairs.ys).copied().collect();
                pooled.sort_by(f64::total_cmp);
                let m = pooled.len();
                let mut cuts: Vec<f64> = (1..*k).map(|i| pooled[(i * m / k).min(m - 1)]).collect();
                cuts.dedup();
                Ok(cuts)
            }
        }
    }
}

fn bin_of(cuts: &[f64], v: f64) -> usize {
    cuts.partition_point(|&c| c <= v)
}

/// Bowker's statistic `Σ_{i<j} (n_ij − n_ji)² / (n_ij + n_ji)` and its degrees of
/// freedom, the number of off-diagonal pairs with `n_ij + n_ji > 0`.
pub fn bowker_statistic(counts: &[Vec<u64>]) -> (f64, usize) {
    let k = counts.len();
    let mut stat = 0.0;
    let mut df = 0;
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (counts[i][j] as f64, counts[j][i] as f64);
            if a + b > 0.0 {
                stat += (a - b) * (a - b) / (a + b);
                df += 1;
            }
        }
    }
    (stat, df)
}

fn merge_bins(counts: &mut Vec<Vec<u64>>, cuts: &mut Vec<f64>, lo: usize) {
    // bins lo and lo+1 become one; the cut between them disappears
    for row in counts.iter_mut() {
        let moved = row.remove(lo + 1);
        row[lo] += moved;
    }
    let moved = counts.remove(lo + 1);
    for (a, b) in counts[lo].iter_mut().zip(moved) {
        *a += b;
    }
    cuts.remove(lo);
}

fn bin_total(counts: &[Vec<u64>], i: usize) -> u64 {
    counts[i].iter().sum::<u64>() + counts.iter().map(|r| r[i]).sum::<u64>()
}

/// Merge adjacent bins until every off-diagonal pair with any mass has at
/// least `MIN_PAIR_COUNT` observations, or two bins remain.
fn coarsen(counts: &mut Vec<Vec<u64>>, cuts: &mut Vec<f64>) -> usize {
    let mut merges = 0;
    while counts.len() > 2 {
        let k = counts.len();
        let sparse = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .find(|&(i, j)| {
                let t = counts[i][j] + counts[j][i];
                t > 0 && t < MIN_PAIR_COUNT
            });
        let Some((i, _)) = sparse else { break };
        // fold bin i into whichever neighbour holds less
        let lo = if i == 0 {
            0
        } else if i == k - 1 || bin_total(counts, i - 1) <= bin_total(counts, i + 1) {
            i - 1
        } else {
            i
        };
        merge_bins(counts, cuts, lo);
        merges += 1;
    }
    merges
}

/// Bowker symmetry test of `(X, Y) =d (Y, X)` on a square grid.
pub fn exchangeability_test(pairs: &PairSample, grid: &Grid, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if pairs.is_empty() {
        return Err(Error::UndersizedSample { got: 0, need: 1 });
    }
    if pairs.iter().any(|(x, y)| x.is_nan() || y.is_nan()) {
        return Err(Error::InvalidArgument("pairs contain NaN".into()));
    }
    let mut cuts = grid.cuts(pairs)?;
    let k = cuts.len() + 1;
    if k < 2 {
        return Err(Error::DegenerateGrid("all quantile cuts coincide".into()));
    }
    let mut counts = vec![vec![0u64; k]; k];
    for (x, y) in pairs.iter() {
        counts[bin_of(&cuts, x)][bin_of(&cuts, y)] += 1;
    }
    if counts.iter().flatten().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::DegenerateGrid("all mass falls in one cell".into()));
    }
    let merges = coarsen(&mut counts, &mut cuts);
    let (stat, df) = bowker_statistic(&counts);
    let p = if df == 0 { 1.0 } else { gamma_ur(df as f64 / 2.0, stat / 2.0) };
    Ok(TestReport::from_p_value("exchangeability-bowker", stat, p, alpha, pairs.len())
        .with_seed(pairs.seed())
        .with("df", df)
        .with("bins", counts.len())
        .with("merges", merges)
        .with("cuts", cuts)
        .with("counts", json!(counts)))
}

/// Least common denominator of the table entries, if it fits in `i64`.
fn common_denominator(table: &DiscreteTable) -> Option<i64> {
    table.probs().iter().flatten().try_fold(1i64, |acc, p| {
        (acc / acc.gcd(p.denom())).checked_mul(*p.denom())
    })
}

fn over(p: Rational64, d: Option<i64>) -> String {
    match d.and_then(|d| p.numer().checked_mul(d / p.denom()).map(|n| (n, d))) {
        Some((n, d)) => format!("{n}/{d}"),
        None => p.to_string(),
    }
}

/// Exact test of `T[x, y] = T[y, x]`; rejects with the first asymmetric cell.
///
/// The statistic is `max |T[x, y] − T[y, x]|`.
pub fn exact_symmetry_check(table: &DiscreteTable, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let gap = table
        .xs()
        .iter()
        .flat_map(|&x| table.ys().iter().map(move |&y| (x, y)))
        .map(|(x, y)| (table.prob(x, y) - table.prob(y, x)).abs())
        .max()
        .unwrap_or_default();
    let stat = *gap.numer() as f64 / *gap.denom() as f64;
    let d = common_denominator(table);
    let cells = table.xs().len() * table.ys().len();
    let report = match table.symmetry_witness() {
        None => TestReport::exact("exchangeability-exact", stat, false, alpha, cells),
        Some(((x, y), p, q)) => TestReport::exact("exchangeability-exact", stat, true, alpha, cells)
            .with("witness_cell", json!([x.to_string(), y.to_string()]))
            .with("mirror_cell", json!([y.to_string(), x.to_string()]))
            .with("witness_prob", over(p, d))
            .with("mirror_prob", over(q, d)),
    };
    Ok(report.with("max_gap", over(gap, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use crate::joint::JointSpec;
    use crate::rng::{new_stream, StreamKey};
    use proptest::prelude::*;

    #[test]
    fn builtin_table_witness() {
        let r = exact_symmetry_check(&DiscreteTable::paper(), 0.01).unwrap();
        assert!(r.rejected());
        assert_eq!(r.p_value, None);
        assert_eq!(r.diagnostics["witness_cell"], json!(["1", "2"]));
        assert_eq!(r.diagnostics["mirror_cell"], json!(["2", "1"]));
        assert_eq!(r.diagnostics["witness_prob"], "9/36");
        assert_eq!(r.diagnostics["mirror_prob"], "1/36");
        assert_eq!(r.diagnostics["max_gap"], "8/36");
    }

    #[test]
    fn symmetric_table_passes() {
        let t = DiscreteTable::new(
            vec![1.into(), 2.into()],
            vec![1.into(), 2.into()],
            vec![
                vec![Rational64::new(1, 4), Rational64::new(1, 8)],
                vec![Rational64::new(1, 8), Rational64::new(1, 2)],
            ],
        )
        .unwrap();
        assert!(exact_symmetry_check(&t, 0.01).unwrap().passed());
    }

    #[test]
    fn iid_normals_pass() {
        let n = DistSpec::normal(0.0, 1.0).unwrap();
        let j = JointSpec::product(n.clone(), n).unwrap();
        let pairs = j.sample_joint(&mut new_stream(StreamKey::new(9, 0)), 100_000).unwrap();
        let r = exchangeability_test(&pairs, &Grid::Quantiles(6), 0.01).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.diagnostics["df"], 15);
    }

    #[test]
    fn region_uniform_rejects() {
        let pairs = JointSpec::region_paper()
            .sample_joint(&mut new_stream(StreamKey::new(9, 1)), 100_000)
            .unwrap();
        let grid = Grid::Edges(vec![0.0, 1.0, 2.0, 3.0]);
        let r = exchangeability_test(&pairs, &grid, 0.001).unwrap();
        assert!(r.rejected());
        // every pair is one-sided: the statistic equals n
        assert_eq!(r.statistic, 100_000.0);
    }

    #[test]
    fn degenerate_grids() {
        let pairs = PairSample { xs: vec![0.5; 50], ys: vec![0.5; 50], provenance: None };
        assert!(matches!(
            exchangeability_test(&pairs, &Grid::Edges(vec![0.0, 1.0, 2.0]), 0.01),
            Err(Error::DegenerateGrid(_))
        ));
        assert!(exchangeability_test(&pairs, &Grid::Quantiles(1), 0.01).is_err());
        assert!(exchangeability_test(&pairs, &Grid::Edges(vec![0.0, 1.0]), 0.01).is_err());
    }

    #[test]
    fn sparse_pairs_are_merged() {
        let mut xs = vec![0.5; 40];
        let mut ys = vec![1.5; 40];
        xs.extend([1.5; 40]);
        ys.extend([0.5; 40]);
        // a lone observation in a far corner
        xs.push(3.5);
        ys.push(0.5);
        let pairs = PairSample { xs, ys, provenance: None };
        let r = exchangeability_test(&pairs, &Grid::Edges(vec![0.0, 1.0, 2.0, 3.0, 4.0]), 0.01).unwrap();
        assert!(r.diagnostics["merges"].as_u64().unwrap() >= 1);
    }

    fn permuted(counts: &[Vec<u64>], perm: &[usize]) -> Vec<Vec<u64>> {
        perm.iter().map(|&i| perm.iter().map(|&j| counts[i][j]).collect()).collect()
    }

    proptest! {
        #[test]
        fn bowker_invariant_under_relabelling(
            (counts, perm) in (2usize..7).prop_flat_map(|k| (
                prop::collection::vec(prop::collection::vec(0u64..50, k), k),
                Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
            ))
        ) {
            let (s0, d0) = bowker_statistic(&counts);
            let (s1, d1) = bowker_statistic(&permuted(&counts, &perm));
            prop_assert_eq!(d0, d1);
            prop_assert!((s0 - s1).abs() <= 1e-9 * s0.max(1.0));
        }
    }
}
