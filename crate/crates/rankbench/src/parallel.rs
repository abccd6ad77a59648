//! Rayon drivers over the per-unit entry points of `rankbench-core`.
//!
//! Output is bit-identical to the sequential versions for any thread count:
//! each unit is a pure function of its index, rows are written into fixed
//! slots, and the first error is chosen by index, not by completion time.

use rankbench_core::{
    assemble_score_matrix, baseline, instance_removal_flags, AnalysisConfig, Dataset, ReplicateScorer,
    ScoreMatrix, SensitivityReport,
};
use rayon::prelude::*;

use crate::Result;

/// Parallel counterpart of [`rankbench_core::generate_score_matrix`].
pub fn generate_score_matrix(d: &Dataset, cfg: &AnalysisConfig) -> Result<ScoreMatrix> {
    let scorer = ReplicateScorer::new(d, cfg)?;
    let n = d.num_solvers();
    let mut scores = vec![0.0; cfg.replicates * n];
    let mut ranks = vec![0u32; cfg.replicates * n];
    let outcomes: Vec<rankbench_core::Result<()>> = scores
        .par_chunks_mut(n)
        .zip(ranks.par_chunks_mut(n))
        .enumerate()
        .map_init(Vec::new, |entries, (i, (s, r))| scorer.score_replicate(i, entries, s, r))
        .collect();
    outcomes.into_iter().collect::<rankbench_core::Result<()>>()?;
    Ok(assemble_score_matrix(d, cfg, scores, ranks))
}

/// Parallel counterpart of [`rankbench_core::leave_one_out_analysis`].
pub fn leave_one_out_analysis(d: &Dataset, cfg: &AnalysisConfig) -> Result<SensitivityReport> {
    let instances = d.instances();
    if instances.len() < 2 {
        return Err(rankbench_core::Error::InvalidConfig("leave-one-out needs at least 2 instances".into()).into());
    }
    let (scores, base) = baseline(d, cfg)?;
    let flags: Vec<_> = instances
        .par_iter()
        .map(|(inst, runs)| instance_removal_flags(d, cfg, &base, inst, runs))
        .collect();
    let flags = flags.into_iter().collect::<rankbench_core::Result<Vec<_>>>()?;
    Ok(SensitivityReport::from_flags(scores, base, flags))
}

/// Runs `f` on a pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("failed to start worker pool")
            .install(f),
        None => f(),
    }
}
