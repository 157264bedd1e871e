//! Two-sided Mann-Whitney U and Wilcoxon signed-rank tests.
//!
//! Both use the exact null distribution for small tie-free samples and a
//! normal approximation with tie and continuity corrections otherwise.

use statrs::distribution::{ContinuousCDF, Normal};

use super::descriptive::average_ranks;
use super::{TestMethod, TestResult};
use crate::error::{Error, Result};

/// Largest per-sample size for the exact Mann-Whitney distribution.
pub const MWU_EXACT_MAX: usize = 8;
/// Largest number of non-zero differences for the exact signed-rank distribution.
pub const WILCOXON_EXACT_MAX: usize = 12;

fn normal_two_sided(deviation: f64, sd: f64) -> f64 {
    if sd <= 0.0 {
        return 1.0;
    }
    let z = (deviation.abs() - 0.5).max(0.0) / sd;
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * unit.sf(z)).min(1.0)
}

/// Frequencies of U = 0..=m*n over all C(m+n, m) rank assignments.
fn mwu_null_counts(m: usize, n: usize) -> Vec<u64> {
    // counts[j][u]: number of ways for samples of size (i, j) to give U = u,
    // built up one first-sample observation at a time.
    let mut prev: Vec<Vec<u64>> = (0..=n).map(|_| vec![1]).collect();
    for i in 1..=m {
        let mut cur: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        cur.push(vec![1]);
        for j in 1..=n {
            let max_u = i * j;
            let mut row = vec![0u64; max_u + 1];
            // largest value belongs to sample one: it exceeds all j of sample two
            for (u, c) in prev[j].iter().enumerate() {
                row[u + j] += c;
            }
            // largest value belongs to sample two
            for (u, c) in cur[j - 1].iter().enumerate() {
                row[u] += c;
            }
            cur.push(row);
        }
        prev = cur;
    }
    prev.swap_remove(n)
}

/// Two-sided Mann-Whitney U test. The reported statistic is
/// min(U_a, U_b), so swapping the samples leaves the result unchanged.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData { required: 1, available: 0 });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = average_ranks(&pooled);
    let ra: f64 = ranks[..na].iter().sum();
    let ua = ra - (na * (na + 1)) as f64 / 2.0;
    let ub = (na * nb) as f64 - ua;
    let u = ua.min(ub);

    let exact = ties.is_empty() && na.max(nb) <= MWU_EXACT_MAX;
    let p_value = if exact {
        let counts = mwu_null_counts(na, nb);
        let total: u64 = counts.iter().sum();
        let k = u.round() as usize;
        let lower: u64 = counts[..=k].iter().sum();
        (2.0 * lower as f64 / total as f64).min(1.0)
    } else {
        let big_n = (na + nb) as f64;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (big_n * (big_n - 1.0));
        let var = (na * nb) as f64 / 12.0 * ((big_n + 1.0) - tie_term);
        normal_two_sided(u - (na * nb) as f64 / 2.0, var.max(0.0).sqrt())
    };
    Ok(TestResult {
        method: TestMethod::MannWhitneyU,
        statistic: u,
        p_value,
        n: vec![na, nb],
        exact,
    })
}

/// Frequencies of W+ = 0..=n(n+1)/2 over all 2^n sign assignments of ranks 1..n.
fn signed_rank_null_counts(n: usize) -> Vec<u64> {
    let max = n * (n + 1) / 2;
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for r in 1..=n {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    counts
}

/// Two-sided Wilcoxon signed-rank test on paired observations, using the
/// differences first - second. Zero differences are dropped before ranking;
/// if none remain the p-value is 1. The statistic is W+, the rank sum of
/// positive differences.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData { required: 1, available: 0 });
    }
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let diffs: Vec<f64> = pairs.iter().map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(TestResult {
            method: TestMethod::WilcoxonSignedRank,
            statistic: 0.0,
            p_value: 1.0,
            n: vec![0],
            exact: true,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    let exact = ties.is_empty() && n <= WILCOXON_EXACT_MAX;
    let mean = (n * (n + 1)) as f64 / 4.0;
    let p_value = if exact {
        let counts = signed_rank_null_counts(n);
        let total = (1u64 << n) as f64;
        let k = w_plus.round() as usize;
        let lower: u64 = counts[..=k].iter().sum();
        let upper: u64 = counts[k..].iter().sum();
        (2.0 * lower.min(upper) as f64 / total).min(1.0)
    } else {
        let nf = n as f64;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        normal_two_sided(w_plus - mean, var.max(0.0).sqrt())
    };
    Ok(TestResult {
        method: TestMethod::WilcoxonSignedRank,
        statistic: w_plus,
        p_value,
        n: vec![n],
        exact,
    })
}
