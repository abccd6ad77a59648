//! Leave-one-instance-out sensitivity of the official ranking.
//!
//! Removing an instance removes all of its runs (every seed). Rankings are
//! compared on their tie-broken listings; a tie straddling a depth
//! boundary is cut where the listing cuts it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::model::{AnalysisConfig, Dataset};
use crate::scoring::{compute_scores, official_ranking, OfficialRanking, RunMultiset, ScoreVector};
use crate::{Error, Result};

/// Listing depths reported per instance: top 10 and top 3.
pub const DEPTHS: [usize; 2] = [10, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankingChange {
    Unchanged,
    /// The set of solvers in the top `depth` differs.
    CompositionChanged,
    /// Same set, different order.
    OrderChanged,
}

/// Compares the first `depth` listing positions of two rankings.
pub fn compare_rankings(base: &OfficialRanking, variant: &OfficialRanking, depth: usize) -> Result<RankingChange> {
    let n = base.order.len();
    if depth == 0 || depth > n || variant.order.len() != n {
        return Err(Error::DepthOutOfRange { depth, solvers: n });
    }
    let a = &base.order[..depth];
    let b = &variant.order[..depth];
    if a == b {
        return Ok(RankingChange::Unchanged);
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    Ok(if sa == sb { RankingChange::OrderChanged } else { RankingChange::CompositionChanged })
}

/// Per-instance outcome of removing that instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFlags {
    pub instance: String,
    /// The full tie-broken listing changed.
    pub any_change: bool,
    /// Some solver's min-rank number changed.
    pub rank_change: bool,
    pub top10_comp: bool,
    pub top10_order: bool,
    pub top3_comp: bool,
    pub top3_order: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SensitivityCounts {
    pub instances: usize,
    pub any_change: usize,
    pub rank_change: usize,
    pub top10_comp: usize,
    pub top10_order: usize,
    pub top3_comp: usize,
    pub top3_order: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub baseline_scores: ScoreVector,
    pub baseline: OfficialRanking,
    pub instances: Vec<InstanceFlags>,
    pub counts: SensitivityCounts,
}

impl SensitivityReport {
    /// Aggregates per-instance flags (given in instance order).
    pub fn from_flags(baseline_scores: ScoreVector, baseline: OfficialRanking, instances: Vec<InstanceFlags>) -> Self {
        let mut counts = SensitivityCounts { instances: instances.len(), ..Default::default() };
        for f in &instances {
            counts.any_change += usize::from(f.any_change);
            counts.rank_change += usize::from(f.rank_change);
            counts.top10_comp += usize::from(f.top10_comp);
            counts.top10_order += usize::from(f.top10_order);
            counts.top3_comp += usize::from(f.top3_comp);
            counts.top3_order += usize::from(f.top3_order);
        }
        SensitivityReport { baseline_scores, baseline, instances, counts }
    }
}

/// Baseline scores and ranking on the full dataset.
pub fn baseline(d: &Dataset, cfg: &AnalysisConfig) -> Result<(ScoreVector, OfficialRanking)> {
    let full = RunMultiset::full(d);
    let scores = compute_scores(d, &cfg.mechanism, &full)?;
    let ranking = official_ranking(&scores, d, &full, &cfg.tiebreak);
    Ok((scores, ranking))
}

/// Flags for removing the instance whose runs are `removed` (ascending run indices).
pub fn instance_removal_flags(
    d: &Dataset,
    cfg: &AnalysisConfig,
    base: &OfficialRanking,
    instance: &str,
    removed: &[usize],
) -> Result<InstanceFlags> {
    let rest = RunMultiset::new((0..d.num_runs()).filter(|r| removed.binary_search(r).is_err()).collect());
    let scores = compute_scores(d, &cfg.mechanism, &rest)?;
    let variant = official_ranking(&scores, d, &rest, &cfg.tiebreak);
    let n = d.num_solvers();
    let mut flags = InstanceFlags {
        instance: instance.to_string(),
        any_change: variant.order != base.order,
        rank_change: variant.ranks != base.ranks,
        top10_comp: false,
        top10_order: false,
        top3_comp: false,
        top3_order: false,
    };
    for depth in DEPTHS {
        let change = compare_rankings(base, &variant, depth.min(n))?;
        let (comp, order) = match depth {
            10 => (&mut flags.top10_comp, &mut flags.top10_order),
            _ => (&mut flags.top3_comp, &mut flags.top3_order),
        };
        *comp = change == RankingChange::CompositionChanged;
        *order = change == RankingChange::OrderChanged;
    }
    Ok(flags)
}

/// Sequential leave-one-instance-out analysis.
pub fn leave_one_out_analysis(d: &Dataset, cfg: &AnalysisConfig) -> Result<SensitivityReport> {
    let instances = d.instances();
    if instances.len() < 2 {
        return Err(Error::InvalidConfig("leave-one-out needs at least 2 instances".to_string()));
    }
    let (scores, base) = baseline(d, cfg)?;
    let flags = instances
        .iter()
        .map(|(inst, runs)| instance_removal_flags(d, cfg, &base, inst, runs))
        .collect::<Result<Vec<_>>>()?;
    Ok(SensitivityReport::from_flags(scores, base, flags))
}
