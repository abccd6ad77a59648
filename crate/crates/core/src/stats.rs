//! Percentile confidence intervals, the one-sided bootstrap test and the
//! Holm-Bonferroni step-down correction.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::resampling::ScoreMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestOutcome {
    pub p_value: f64,
    pub rejected: bool,
}

/// 1-based nearest-rank position `ceil(q * k)`, clamped to `1..=k`.
///
/// Products within `1e-9` of an integer are snapped to it first, so
/// `0.975 * 10_000` selects 9750 even though neither factor is exact.
pub fn nearest_rank_position(q: f64, k: usize) -> usize {
    let x = q * k as f64;
    let snapped = libm::round(x);
    let pos = if (x - snapped).abs() <= 1e-9 * (k as f64).max(1.0) { snapped } else { libm::ceil(x) };
    (pos.max(1.0) as usize).min(k.max(1))
}

/// Nearest-rank quantile of an ascending-sorted, non-empty slice.
pub fn nearest_rank<T: Copy>(sorted: &[T], q: f64) -> T {
    sorted[nearest_rank_position(q, sorted.len()) - 1]
}

/// Percentile-method `(1 - alpha)` interval using nearest-rank quantiles.
pub fn percentile_ci(samples: &[f64], alpha: f64) -> Result<ConfidenceInterval> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig("alpha must lie in (0, 1)".to_string()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ConfidenceInterval {
        lower: nearest_rank(&sorted, alpha / 2.0),
        upper: nearest_rank(&sorted, 1.0 - alpha / 2.0),
        alpha,
    })
}

/// Fraction of replicates in which column `s1` scores at most column `s2`.
pub fn bootstrap_p_value(m: &ScoreMatrix, s1: usize, s2: usize) -> f64 {
    let k = m.replicates();
    let hits = (0..k).filter(|&i| m.score(i, s1) <= m.score(i, s2)).count();
    hits as f64 / k as f64
}

/// One-sided test of `H0: score(s1) <= score(s2)`; rejected iff `p < alpha`.
pub fn bootstrap_p(m: &ScoreMatrix, s1: &str, s2: &str, alpha: f64) -> Result<TestOutcome> {
    let i = m.solver_index(s1).ok_or_else(|| Error::UnknownSolver(s1.to_string()))?;
    let j = m.solver_index(s2).ok_or_else(|| Error::UnknownSolver(s2.to_string()))?;
    if i == j {
        return Err(Error::InvalidConfig("bootstrap test needs two distinct solvers".to_string()));
    }
    let p_value = bootstrap_p_value(m, i, j);
    Ok(TestOutcome { p_value, rejected: p_value < alpha })
}

/// Holm's step-down procedure. Returns the original indices of the rejected
/// hypotheses, ascending.
///
/// P-values are walked in ascending order (stable on ties); the walk stops
/// at the first `p'_i >= alpha / (m + 1 - i)` and everything before it is
/// rejected.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Vec<usize> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let passed = order
        .iter()
        .enumerate()
        .take_while(|&(step, &idx)| p_values[idx] < holm_threshold(alpha, m, step + 1))
        .count();
    let mut rejected: Vec<usize> = order[..passed].to_vec();
    rejected.sort_unstable();
    rejected
}

/// Threshold `alpha / (m + 1 - i)` for 1-based step `i`.
pub fn holm_threshold(alpha: f64, m: usize, step: usize) -> f64 {
    alpha / (m + 1 - step) as f64
}
