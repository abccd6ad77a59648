//! Robust grouped rankings built from a bootstrap score matrix, plus the
//! diagnostics used to compare them against an official ranking.
//!
//! The grouping loop:
//!
//! 1. Among the remaining solvers, the winner `s*` is the one ranked first
//!    (ties included) in the most replicates. Count ties fall to the higher
//!    median replicate score, then to the smaller solver id.
//! 2. Every other remaining solver `s_j` is tested against `s*` with
//!    `p_j = #{i : score_i(s*) <= score_i(s_j)} / k`, i.e. the one-sided
//!    test of `H0: score(s*) <= score(s_j)`.
//! 3. Holm-Bonferroni runs over those p-values. Solvers whose hypothesis
//!    survives join `s*` in the current group; rejected solvers move on.
//! 4. Repeat on the rejected solvers until none remain.

use alloc::vec;
use alloc::vec::Vec;

use crate::scoring::OfficialRanking;
use crate::resampling::ScoreMatrix;
use crate::stats::{bootstrap_p_value, holm_bonferroni, holm_threshold, nearest_rank};

/// Fraction of replicates in which each solver is ranked first.
#[derive(Debug, Clone, PartialEq)]
pub struct WinTable {
    pub counts: Vec<usize>,
    pub fractions: Vec<f64>,
}

/// A solver is first in a row iff no solver scores strictly higher there.
pub fn empirical_win_fractions(m: &ScoreMatrix) -> WinTable {
    let all: Vec<usize> = (0..m.num_solvers()).collect();
    let counts = first_place_counts(m, &all);
    let k = m.replicates() as f64;
    let fractions = counts.iter().map(|&c| c as f64 / k).collect();
    WinTable { counts, fractions }
}

/// First-place counts restricted to the columns in `cols`, aligned with `cols`.
fn first_place_counts(m: &ScoreMatrix, cols: &[usize]) -> Vec<usize> {
    let mut counts = vec![0usize; cols.len()];
    for i in 0..m.replicates() {
        let best = cols.iter().map(|&c| m.score(i, c)).fold(f64::NEG_INFINITY, f64::max);
        for (slot, &c) in counts.iter_mut().zip(cols) {
            if m.score(i, c) == best {
                *slot += 1;
            }
        }
    }
    counts
}

/// Nearest-rank median of each solver's replicate scores.
pub fn median_scores(m: &ScoreMatrix) -> Vec<f64> {
    (0..m.num_solvers())
        .map(|s| {
            let mut col = m.score_column(s);
            col.sort_by(f64::total_cmp);
            nearest_rank(&col, 0.5)
        })
        .collect()
}

fn select_among(m: &ScoreMatrix, cols: &[usize], medians: &[f64]) -> usize {
    let counts = first_place_counts(m, cols);
    let ids = m.solvers();
    let mut best = 0;
    for j in 1..cols.len() {
        let (a, b) = (cols[j], cols[best]);
        let better = counts[j] > counts[best]
            || (counts[j] == counts[best]
                && (medians[a] > medians[b] || (medians[a] == medians[b] && ids[a] < ids[b])));
        if better {
            best = j;
        }
    }
    cols[best]
}

/// The solver ranked first in the most replicates (solver index).
pub fn select_winner(m: &ScoreMatrix) -> usize {
    let all: Vec<usize> = (0..m.num_solvers()).collect();
    select_among(m, &all, &median_scores(m))
}

/// One group of statistically tied solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct RankGroup {
    /// 1-based.
    pub index: usize,
    /// Solver indices by descending median replicate score, then id.
    pub members: Vec<usize>,
    pub fractional_rank: f64,
}

/// Audit record of one grouping iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub winner: usize,
    /// Solvers tested against the winner, in solver order.
    pub candidates: Vec<usize>,
    /// `p_values[j]` belongs to `candidates[j]`.
    pub p_values: Vec<f64>,
    /// Holm threshold each candidate's p-value was held against.
    pub thresholds: Vec<f64>,
    /// Candidates whose hypothesis was rejected (demoted).
    pub rejected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustRanking {
    pub groups: Vec<RankGroup>,
    pub iterations: Vec<IterationRecord>,
}

impl RobustRanking {
    /// 1-based group index per solver index.
    pub fn group_of(&self) -> Vec<usize> {
        let n = self.groups.iter().map(|g| g.members.len()).sum();
        let mut out = vec![0; n];
        for g in &self.groups {
            for &s in &g.members {
                out[s] = g.index;
            }
        }
        out
    }

    pub fn fractional_rank_of(&self) -> Vec<f64> {
        let n = self.groups.iter().map(|g| g.members.len()).sum();
        let mut out = vec![0.0; n];
        for g in &self.groups {
            for &s in &g.members {
                out[s] = g.fractional_rank;
            }
        }
        out
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.members.len()).collect()
    }

    /// Number of groups with at least one member in `subset` (all if `None`).
    pub fn group_count(&self, subset: Option<&[usize]>) -> usize {
        self.groups
            .iter()
            .filter(|g| g.members.iter().any(|s| in_subset(subset, *s)))
            .count()
    }
}

fn in_subset(subset: Option<&[usize]>, s: usize) -> bool {
    subset.is_none_or(|sub| sub.contains(&s))
}

/// Iterated winner selection, pairwise tests and Holm correction.
pub fn robust_ranking(m: &ScoreMatrix, alpha: f64) -> RobustRanking {
    let medians = median_scores(m);
    let ids = m.solvers();
    let mut remaining: Vec<usize> = (0..m.num_solvers()).collect();
    let mut members_per_group: Vec<Vec<usize>> = Vec::new();
    let mut iterations = Vec::new();

    while !remaining.is_empty() {
        let winner = select_among(m, &remaining, &medians);
        let candidates: Vec<usize> = remaining.iter().copied().filter(|&s| s != winner).collect();
        let p_values: Vec<f64> = candidates.iter().map(|&c| bootstrap_p_value(m, winner, c)).collect();
        let rejected_idx = holm_bonferroni(&p_values, alpha);

        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
        let mut thresholds = vec![0.0; candidates.len()];
        for (step, &j) in order.iter().enumerate() {
            thresholds[j] = holm_threshold(alpha, candidates.len(), step + 1);
        }

        let rejected: Vec<usize> = rejected_idx.iter().map(|&j| candidates[j]).collect();
        let mut group = vec![winner];
        group.extend(candidates.iter().copied().filter(|c| !rejected.contains(c)));
        group.sort_by(|&a, &b| medians[b].total_cmp(&medians[a]).then_with(|| ids[a].cmp(&ids[b])));

        iterations.push(IterationRecord { winner, candidates, p_values, thresholds, rejected: rejected.clone() });
        members_per_group.push(group);
        remaining = rejected;
    }

    let sizes: Vec<usize> = members_per_group.iter().map(Vec::len).collect();
    let groups = members_per_group
        .into_iter()
        .zip(fractional_ranks(&sizes))
        .enumerate()
        .map(|(i, (members, fractional_rank))| RankGroup { index: i + 1, members, fractional_rank })
        .collect();
    RobustRanking { groups, iterations }
}

/// Mid-rank of each group given the group sizes in rank order.
pub fn fractional_ranks(group_sizes: &[usize]) -> Vec<f64> {
    let mut start = 1usize;
    group_sizes
        .iter()
        .map(|&n| {
            let end = start + n - 1;
            let r = (start + end) as f64 / 2.0;
            start = end + 1;
            r
        })
        .collect()
}

/// Number of tied pairs: `sum C(n_g, 2)` over groups, counting only members
/// in `subset`.
pub fn tied_pair_count(r: &RobustRanking, subset: Option<&[usize]>) -> u64 {
    r.groups
        .iter()
        .map(|g| {
            let n = g.members.iter().filter(|&&s| in_subset(subset, s)).count() as u64;
            n * n.saturating_sub(1) / 2
        })
        .sum()
}

/// Solver pairs ranked one way officially and the other way by groups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Inversions {
    /// `(a, b)`: `a` has the worse official rank but the better group.
    pub pairs: Vec<(usize, usize)>,
}

impl Inversions {
    pub fn count(&self) -> usize {
        self.pairs.len()
    }
}

pub fn inversion_count(official: &OfficialRanking, robust: &RobustRanking, subset: Option<&[usize]>) -> Inversions {
    let group = robust.group_of();
    let solvers: Vec<usize> = (0..group.len()).filter(|&s| in_subset(subset, s)).collect();
    let mut pairs = Vec::new();
    for &a in &solvers {
        for &b in &solvers {
            if official.ranks[a] > official.ranks[b] && group[a] < group[b] {
                pairs.push((a, b));
            }
        }
    }
    Inversions { pairs }
}

fn iqr_of<T: Copy + PartialOrd + Into<f64>>(mut col: Vec<T>) -> f64 {
    col.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    nearest_rank(&col, 0.75).into() - nearest_rank(&col, 0.25).into()
}

/// Inter-quartile range of one solver's per-replicate min-rank.
pub fn rank_iqr(m: &ScoreMatrix, solver: usize) -> f64 {
    iqr_of(m.rank_column(solver))
}

fn mean_over(subset: Option<&[usize]>, n: usize, f: impl Fn(usize) -> f64) -> f64 {
    let solvers: Vec<usize> = (0..n).filter(|&s| in_subset(subset, s)).collect();
    if solvers.is_empty() {
        return 0.0;
    }
    solvers.iter().map(|&s| f(s)).sum::<f64>() / solvers.len() as f64
}

/// Mean rank IQR over `subset` (all solvers if `None`; 0 for an empty subset).
pub fn mean_rank_iqr(m: &ScoreMatrix, subset: Option<&[usize]>) -> f64 {
    mean_over(subset, m.num_solvers(), |s| rank_iqr(m, s))
}

/// Same as [`mean_rank_iqr`] on replicate scores instead of ranks.
pub fn mean_score_iqr(m: &ScoreMatrix, subset: Option<&[usize]>) -> f64 {
    mean_over(subset, m.num_solvers(), |s| iqr_of(m.score_column(s)))
}
