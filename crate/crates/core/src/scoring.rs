//! Competition scoring over arbitrary multisets of runs, and the official
//! ranking derived from the scores.
//!
//! Every mechanism is a sum of per-entry contributions, optionally
//! normalised by the multiset size. Scores are oriented higher-is-better
//! throughout; PAR-k is negated to fit.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::model::{Dataset, RunStatus};
use crate::{Error, Result};

/// Scoring mechanism and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanism {
    /// Number of runs solved within the cutoff.
    SolvedCount,
    /// Number of runs with status `solved_optimal`.
    OptimalCount,
    /// Negated penalised average runtime; failures cost `k * cutoff`.
    ParK(f64),
    /// Sum of `best_known_quality / quality` over solved runs.
    IpcQuality,
    /// Sum of `1 / (1 + log10(max(t,1) / max(t_ref,1)))`, clamped to [0, 1],
    /// over runs solved within the cutoff.
    IpcAgile,
    /// Mean of the quality field over all runs.
    MeanMetric,
}

impl Mechanism {
    pub const IDS: [&'static str; 6] =
        ["solved_count", "optimal_count", "par_k", "ipc_quality", "ipc_agile", "mean_metric"];
    pub const DEFAULT_PAR_K: f64 = 10.0;

    pub fn id(&self) -> &'static str {
        match self {
            Mechanism::SolvedCount => "solved_count",
            Mechanism::OptimalCount => "optimal_count",
            Mechanism::ParK(_) => "par_k",
            Mechanism::IpcQuality => "ipc_quality",
            Mechanism::IpcAgile => "ipc_agile",
            Mechanism::MeanMetric => "mean_metric",
        }
    }

    /// Resolves a mechanism id; `par_k` is only consulted for `par_k`.
    pub fn from_id(id: &str, par_k: f64) -> Result<Self> {
        Ok(match id {
            "solved_count" => Mechanism::SolvedCount,
            "optimal_count" => Mechanism::OptimalCount,
            "par_k" => Mechanism::ParK(par_k),
            "ipc_quality" => Mechanism::IpcQuality,
            "ipc_agile" => Mechanism::IpcAgile,
            "mean_metric" => Mechanism::MeanMetric,
            other => return Err(Error::UnknownMechanism(other.to_string())),
        })
    }

    /// Contribution of one run of one solver. The score of a multiset is
    /// [`Mechanism::finish`] applied to the sum of its entries' contributions.
    pub fn contribution(&self, d: &Dataset, solver: usize, run: usize) -> Result<f64> {
        let rec = d.record(solver, run);
        let cutoff = d.cutoff();
        let ok = rec.succeeded(cutoff);
        let missing_ref = |field: &'static str| {
            let key = &d.runs()[run];
            Error::MissingReference { instance: key.instance.clone(), seed: key.seed, field }
        };
        let missing_quality = || {
            let key = &d.runs()[run];
            Error::MissingQuality {
                solver: d.solvers()[solver].clone(),
                instance: key.instance.clone(),
                seed: key.seed,
            }
        };
        Ok(match *self {
            Mechanism::SolvedCount => f64::from(u8::from(ok)),
            Mechanism::OptimalCount => f64::from(u8::from(rec.status == RunStatus::SolvedOptimal)),
            Mechanism::ParK(k) => {
                if ok {
                    rec.cpu_time
                } else {
                    k * cutoff
                }
            }
            Mechanism::IpcQuality => {
                let best = d.reference_for(run).ok_or_else(|| missing_ref("best_known_quality"))?.best_known_quality;
                if ok {
                    best / rec.quality.ok_or_else(missing_quality)?
                } else {
                    0.0
                }
            }
            Mechanism::IpcAgile => {
                let reference = d.reference_for(run).ok_or_else(|| missing_ref("reference_time"))?.reference_time;
                if ok {
                    agile_contribution(rec.cpu_time, reference)
                } else {
                    0.0
                }
            }
            Mechanism::MeanMetric => rec.quality.ok_or_else(missing_quality)?,
        })
    }

    /// Turns a contribution sum over `n` entries into a score.
    #[inline]
    pub fn finish(&self, sum: f64, n: usize) -> f64 {
        match self {
            Mechanism::ParK(_) => -(sum / n as f64),
            Mechanism::MeanMetric => sum / n as f64,
            _ => sum,
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::ParK(k) => write!(f, "par_k({k})"),
            m => f.write_str(m.id()),
        }
    }
}

fn agile_contribution(time: f64, reference: f64) -> f64 {
    let t = time.max(1.0);
    let r = reference.max(1.0);
    if t <= r {
        return 1.0;
    }
    (1.0 / (1.0 + libm::log10(t / r))).clamp(0.0, 1.0)
}

/// A multiset of runs, as indices into `Dataset::runs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunMultiset {
    pub entries: Vec<usize>,
}

impl RunMultiset {
    pub fn new(entries: Vec<usize>) -> Self {
        RunMultiset { entries }
    }

    /// Every run exactly once.
    pub fn full(d: &Dataset) -> Self {
        RunMultiset { entries: (0..d.num_runs()).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Scores in dataset solver order; higher is better.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
}

impl ScoreVector {
    pub fn get(&self, d: &Dataset, solver: &str) -> Option<f64> {
        d.solver_index(solver).map(|i| self.scores[i])
    }
}

/// Scores every solver on `rs`; repeated entries count repeatedly.
pub fn compute_scores(d: &Dataset, mechanism: &Mechanism, rs: &RunMultiset) -> Result<ScoreVector> {
    let n = d.num_solvers();
    let mut sums = vec![0.0; n];
    for &run in &rs.entries {
        for (s, acc) in sums.iter_mut().enumerate() {
            *acc += mechanism.contribution(d, s, run)?;
        }
    }
    let scores = sums.into_iter().map(|x| mechanism.finish(x, rs.len())).collect();
    Ok(ScoreVector { scores })
}

/// Precomputed per-(run, solver) contributions for fast repeated scoring.
///
/// Summation order matches [`compute_scores`], so both paths give
/// bit-identical scores for the same multiset. Runs whose contribution
/// cannot be computed (missing reference data, missing quality) are kept
/// with their error, which surfaces only when a multiset draws them.
#[derive(Debug, Clone)]
pub struct ContributionTable {
    mechanism: Mechanism,
    solvers: usize,
    /// Run-major: `values[run * solvers + solver]`.
    values: Vec<f64>,
    failures: Vec<Option<Error>>,
}

impl ContributionTable {
    pub fn new(d: &Dataset, mechanism: &Mechanism) -> Self {
        let solvers = d.num_solvers();
        let mut values = vec![0.0; solvers * d.num_runs()];
        let mut failures = vec![None; d.num_runs()];
        for run in 0..d.num_runs() {
            for s in 0..solvers {
                match mechanism.contribution(d, s, run) {
                    Ok(v) => values[run * solvers + s] = v,
                    Err(e) => {
                        failures[run] = Some(e);
                        break;
                    }
                }
            }
        }
        ContributionTable { mechanism: *mechanism, solvers, values, failures }
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    /// Scores `entries` into `out` (length = solver count).
    pub fn score_into(&self, entries: &[usize], out: &mut [f64]) -> Result<()> {
        out.fill(0.0);
        for &run in entries {
            if let Some(e) = &self.failures[run] {
                return Err(e.clone());
            }
            let row = &self.values[run * self.solvers..(run + 1) * self.solvers];
            for (acc, v) in out.iter_mut().zip(row) {
                *acc += v;
            }
        }
        for x in out.iter_mut() {
            *x = self.mechanism.finish(*x, entries.len());
        }
        Ok(())
    }
}

/// Secondary sort keys for the official listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiebreakKey {
    /// Total CPU time over successful runs, ascending.
    TotalTime,
    /// Solver id, ascending. Always applied last whether listed or not.
    SolverId,
}

impl TiebreakKey {
    pub fn id(&self) -> &'static str {
        match self {
            TiebreakKey::TotalTime => "total_time",
            TiebreakKey::SolverId => "solver_id",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "total_time" => Ok(TiebreakKey::TotalTime),
            "solver_id" => Ok(TiebreakKey::SolverId),
            other => Err(Error::UnknownTiebreak(other.to_string())),
        }
    }
}

/// Official-style result: a listing and min-ranks ("1224").
///
/// Ranks depend on the score alone. The tiebreak chain only orders the
/// listing inside a block of equal scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfficialRanking {
    /// Solver indices, best first.
    pub order: Vec<usize>,
    /// Min-rank per solver index.
    pub ranks: Vec<u32>,
}

impl OfficialRanking {
    /// Solver ids of the first `depth` listing positions.
    pub fn top<'a>(&self, d: &'a Dataset, depth: usize) -> Vec<&'a str> {
        self.order.iter().take(depth).map(|&s| d.solvers()[s].as_str()).collect()
    }
}

/// Ranks solvers by `sv` (descending), breaking listing ties by `tiebreak`
/// evaluated over the runs in `rs`, then by solver id.
pub fn official_ranking(
    sv: &ScoreVector,
    d: &Dataset,
    rs: &RunMultiset,
    tiebreak: &[TiebreakKey],
) -> OfficialRanking {
    let times = if tiebreak.contains(&TiebreakKey::TotalTime) {
        let cutoff = d.cutoff();
        let mut t = vec![0.0; d.num_solvers()];
        for &run in &rs.entries {
            for (s, acc) in t.iter_mut().enumerate() {
                let rec = d.record(s, run);
                if rec.succeeded(cutoff) {
                    *acc += rec.cpu_time;
                }
            }
        }
        Some(t)
    } else {
        None
    };
    rank_scores(&sv.scores, d.solvers(), times.as_deref(), tiebreak)
}

/// Listing and min-ranks for a bare score row.
pub(crate) fn rank_scores(
    scores: &[f64],
    ids: &[String],
    total_times: Option<&[f64]>,
    tiebreak: &[TiebreakKey],
) -> OfficialRanking {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let mut ord = scores[b].total_cmp(&scores[a]);
        for key in tiebreak {
            if ord != Ordering::Equal {
                break;
            }
            if let (TiebreakKey::TotalTime, Some(t)) = (key, total_times) {
                ord = t[a].total_cmp(&t[b]);
            }
        }
        ord.then_with(|| ids[a].cmp(&ids[b]))
    });
    let ranks = min_ranks(scores);
    OfficialRanking { order, ranks }
}

/// Min-rank of each score: one plus the number of strictly greater scores.
pub(crate) fn min_ranks(scores: &[f64]) -> Vec<u32> {
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    scores
        .iter()
        .map(|x| sorted.partition_point(|y| y > x) as u32 + 1)
        .collect()
}
