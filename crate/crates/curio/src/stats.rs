//! Nonparametric summaries and the two-sample Mann-Whitney U test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Combined sample size up to which the U distribution is enumerated exactly.
pub const EXACT_LIMIT: usize = 50;

/// Linear-interpolation quantile (type 7) of `values`.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spread {
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
}

pub fn spread(values: &[f64]) -> Option<Spread> {
    let q1 = quantile(values, 0.25)?;
    let q3 = quantile(values, 0.75)?;
    Some(Spread { n: values.len(), median: median(values)?, q1, q3, iqr: q3 - q1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub exact: bool,
}

/// Midranks of the pooled sample, doubled so ties stay integral.
fn doubled_ranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 share their mean; twice that is i+j+2
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Mann-Whitney U test of `a` against `b`.
///
/// Exact (conditional on the observed ties) when the pooled sample has at most
/// [`EXACT_LIMIT`] values, normal approximation with tie and continuity
/// corrections otherwise.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Analysis("Mann-Whitney needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Analysis("Mann-Whitney samples contain NaN".into()));
    }
    let (n, m) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_ranks(&pooled);
    let w2: u64 = ranks[..n].iter().sum();
    let u = w2 as f64 / 2.0 - (n * (n + 1)) as f64 / 2.0;

    if ranks.iter().all(|&r| r == ranks[0]) {
        return Ok(MannWhitney { u, p: 1.0, exact: n + m <= EXACT_LIMIT });
    }
    if n + m <= EXACT_LIMIT {
        return Ok(MannWhitney { u, p: exact_p(&ranks, n, w2), exact: true });
    }

    let big_n = (n + m) as f64;
    let mean = (n * m) as f64 / 2.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.clone();
    sorted.sort_unstable();
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = (n * m) as f64 / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(MannWhitney { u, p: (2.0 * (1.0 - normal.cdf(z))).min(1.0), exact: false })
}

/// Permutation p-value: the share of size-`n` subsets of `ranks` whose doubled
/// rank sum is at least as far from its mean as `w2`.
fn exact_p(ranks: &[u64], n: usize, w2: u64) -> f64 {
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    // ways[k][s]: subsets of size k with doubled rank sum s
    let mut ways = vec![vec![0.0f64; width]; n + 1];
    ways[0][0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for k in (1..=n).rev() {
            let (lower, upper) = ways.split_at_mut(k);
            let (src, dst) = (&lower[k - 1], &mut upper[0]);
            for s in (r..width).rev() {
                dst[s] += src[s - r];
            }
        }
    }
    // mean doubled rank sum: n (N + 1)
    let mean = (n * (ranks.len() + 1)) as i64;
    let observed = (w2 as i64 - mean).abs();
    let total: f64 = ways[n].iter().sum();
    let extreme: f64 =
        ways[n].iter().enumerate().filter(|(s, _)| (*s as i64 - mean).abs() >= observed).map(|(_, c)| c).sum();
    (extreme / total).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Enumerates every split of the pooled sample.
    fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let n = a.len();
        let total = pooled.len();
        let u_of = |idx: &[usize]| -> f64 {
            let mut u = 0.0;
            for (i, x) in pooled.iter().enumerate() {
                if !idx.contains(&i) {
                    continue;
                }
                for (j, y) in pooled.iter().enumerate() {
                    if idx.contains(&j) {
                        continue;
                    }
                    u += if x > y {
                        1.0
                    } else if x == y {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
            u
        };
        let observed: Vec<usize> = (0..n).collect();
        let mean = (n * (total - n)) as f64 / 2.0;
        let dev = (u_of(&observed) - mean).abs();
        let (mut hit, mut all) = (0u64, 0u64);
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let idx: Vec<usize> = (0..total).filter(|i| mask & (1 << i) != 0).collect();
            all += 1;
            if (u_of(&idx) - mean).abs() >= dev - 1e-9 {
                hit += 1;
            }
        }
        hit as f64 / all as f64
    }

    #[test]
    fn quantiles() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        let s = spread(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((s.q1, s.q3, s.iqr), (2.0, 4.0, 2.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn separated_three_vs_three() {
        let r = mann_whitney(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(r.u, 0.0);
        // 2 extreme splits out of C(6,3) = 20
        assert!((r.p - 0.1).abs() < 1e-12, "{}", r.p);
    }

    #[test]
    fn separated_five_vs_five() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [10.0, 20.0, 30.0, 40.0, 50.0];
        let r = mann_whitney(&a, &b).unwrap();
        // 2 / C(10,5) = 2 / 252
        assert!((r.p - 2.0 / 252.0).abs() < 1e-12);
        assert!(r.p < 0.05);
    }

    #[test]
    fn total_ties_give_one() {
        let r = mann_whitney(&[4.0; 5], &[4.0; 6]).unwrap();
        assert_eq!(r.p, 1.0);
        assert_eq!(r.u, 15.0);
    }

    #[test]
    fn rejects_empty() {
        assert!(mann_whitney(&[], &[1.0]).is_err());
    }

    #[test]
    fn large_samples_use_normal() {
        let a: Vec<f64> = (0..40).map(f64::from).collect();
        let b: Vec<f64> = (0..40).map(|x| f64::from(x) + 0.5).collect();
        let r = mann_whitney(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p > 0.5);
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(
            a in prop::collection::vec(0u8..5, 1..6),
            b in prop::collection::vec(0u8..5, 1..6),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let r = mann_whitney(&a, &b).unwrap();
            prop_assert!((r.p - brute_force_p(&a, &b)).abs() < 1e-9);
        }

        #[test]
        fn symmetric_under_relabeling(
            a in prop::collection::vec(-50i32..50, 3..12),
            b in prop::collection::vec(-50i32..50, 3..12),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            let ab = mann_whitney(&a, &b).unwrap();
            let ba = mann_whitney(&b, &a).unwrap();
            prop_assert!((ab.p - ba.p).abs() < 1e-12);
            prop_assert!((ab.u + ba.u - (a.len() * b.len()) as f64).abs() < 1e-9);
        }
    }
}
