//! Two-sided Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped, tied absolute differences share average
//! ranks and the statistic is the smaller of the positive and negative rank
//! sums. Small samples (fewer than 10 non-zero pairs) use the exact null
//! distribution of untied ranks, as the classical tables do; larger samples
//! use the normal approximation with tie-corrected variance and a
//! continuity correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// How the p-value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

/// Test outcome. `no_decision` marks the degenerate all-zero-difference
/// case, reported with `p_value = 1` and `reject = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonOutcome {
    /// `min(W+, W-)` over the non-zero differences.
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub no_decision: bool,
    /// Pairs remaining after zero differences are removed.
    pub pairs_used: usize,
    pub method: Option<WilcoxonMethod>,
}

/// Average ranks of the values (1-based, ties share the mean rank).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j hold equal values; mean of ranks i+1..=j+1
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Exact two-sided p-value from the classical null distribution of the rank
/// sum over untied ranks `1..=n` (the tables' convention; the observed
/// statistic may be half-integer when ties shared ranks).
fn exact_p_value(n: usize, statistic: f64) -> f64 {
    debug_assert!(n < 64);
    let total = 1u64 << n;
    let mut count_le = 0u64;
    for mask in 0..total {
        let mut sum = 0u64;
        for rank in 1..=n {
            if mask & (1 << (rank - 1)) != 0 {
                sum += rank as u64;
            }
        }
        if sum as f64 <= statistic {
            count_le += 1;
        }
    }
    (2.0 * count_le as f64 / total as f64).min(1.0)
}

fn normal_approx_p_value(ranks: &[f64], statistic: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // tie correction: subtract (t^3 - t)/48 per group of tied ranks
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        variance -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    let continuity = if statistic == mean { 0.0 } else { 0.5 * (statistic - mean).signum() };
    let z = (statistic - mean - continuity) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * normal.cdf(-z.abs())).min(1.0)
}

/// Runs the paired two-sided test at significance `alpha`.
///
/// Needs at least 5 non-zero differences; identical vectors produce the
/// flagged no-decision outcome instead.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alpha: f64) -> Result<WilcoxonOutcome> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::InvalidInput(format!(
            "paired vectors must be non-empty and equal length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must be in (0, 1), got {alpha}")));
    }

    let differences: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| a - b)
        .filter(|&d| d != 0.0)
        .collect();

    if differences.is_empty() {
        return Ok(WilcoxonOutcome {
            statistic: 0.0,
            p_value: 1.0,
            reject: false,
            no_decision: true,
            pairs_used: 0,
            method: None,
        });
    }
    if differences.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "need at least 5 non-zero paired differences, got {}",
            differences.len()
        )));
    }

    let absolute: Vec<f64> = differences.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&absolute);
    let w_plus: f64 = differences
        .iter()
        .zip(&ranks)
        .filter(|&(&d, _)| d > 0.0)
        .map(|(_, &r)| r)
        .sum();
    let rank_total: f64 = ranks.iter().sum();
    let w_minus = rank_total - w_plus;
    let statistic = w_plus.min(w_minus);

    let (method, p_value) = if differences.len() < 10 {
        (WilcoxonMethod::Exact, exact_p_value(differences.len(), statistic))
    } else {
        (
            WilcoxonMethod::NormalApprox,
            normal_approx_p_value(&ranks, statistic),
        )
    };

    Ok(WilcoxonOutcome {
        statistic,
        p_value,
        reject: p_value < alpha,
        no_decision: false,
        pairs_used: differences.len(),
        method: Some(method),
    })
}
