//! Statistically robust ranking of solver competition results.
//!
//! This crate holds the pure algorithmic part of `rankbench`: the competition
//! data model, pluggable scoring mechanisms, bootstrap replicate generation,
//! percentile confidence intervals, the one-sided bootstrap test with
//! Holm-Bonferroni correction, the iterated grouping that yields robust
//! rankings, and leave-one-instance-out sensitivity analysis.
//!
//! Everything here is `no_std` (with `alloc`) and single-threaded. Work that
//! can be parallelised is exposed per unit (one replicate, one removed
//! instance) so a driver can fan it out and still produce bit-identical
//! results; see the `rankbench` crate for the rayon-backed drivers, file
//! formats and the command-line tool.
#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

mod error;
pub mod model;
pub mod ranking;
pub mod resampling;
pub mod scoring;
pub mod sensitivity;
pub mod stats;

pub use error::{Error, Result};
pub use model::{
    validate_dataset, AnalysisConfig, Dataset, DatasetBuilder, Reference, RunKey, RunRecord,
    RunStatus, Violation, DEFAULT_STRATUM,
};
pub use ranking::{
    empirical_win_fractions, fractional_ranks, inversion_count, mean_rank_iqr, mean_score_iqr,
    median_scores, rank_iqr, robust_ranking, select_winner, tied_pair_count, Inversions,
    IterationRecord, RankGroup, RobustRanking, WinTable,
};
pub use resampling::{
    assemble_score_matrix, draw_stratified_replicate, draw_uniform_replicate,
    generate_score_matrix, replicate_rng, Provenance, ReplicateRng, ReplicateScorer, ScoreMatrix,
    Strata,
};
pub use scoring::{
    compute_scores, official_ranking, ContributionTable, Mechanism, OfficialRanking, RunMultiset,
    ScoreVector, TiebreakKey,
};
pub use sensitivity::{
    baseline, compare_rankings, instance_removal_flags, leave_one_out_analysis, InstanceFlags,
    RankingChange, SensitivityCounts, SensitivityReport,
};
pub use stats::{
    bootstrap_p, bootstrap_p_value, holm_bonferroni, holm_threshold, nearest_rank,
    nearest_rank_position, percentile_ci, ConfidenceInterval, TestOutcome,
};
