//! Bootstrap replicates of a competition and the resulting score matrix.
//!
//! Reproducibility contract:
//!
//! * Replicate `i` draws from ChaCha8 keyed with the 32-byte seed whose
//!   first 8 bytes are `master_seed` in little-endian order (remaining bytes
//!   zero), on stream `i`.
//! * A uniform index below `n` is `(x * n) >> 64` for the next 64-bit output
//!   `x` (multiply-shift, no rejection).
//! * Uniform replicates draw `|R|` indices over all runs. Stratified
//!   replicates walk strata in order of first appearance in the run list
//!   and, for a stratum with `m` runs, draw `m` indices into that stratum's
//!   run list (in run order).
//!
//! Row `i` of a [`ScoreMatrix`] therefore depends on `(master_seed, i)` only,
//! never on evaluation order or thread count.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::model::{AnalysisConfig, Dataset};
use crate::scoring::{min_ranks, ContributionTable, Mechanism, RunMultiset};
use crate::{Error, Result};

/// Deterministic generator state for one replicate.
#[derive(Debug, Clone)]
pub struct ReplicateRng(ChaCha8Rng);

impl ReplicateRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `0..n` by multiply-shift.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        ((u128::from(self.0.next_u64()) * n as u128) >> 64) as usize
    }
}

/// Substream for replicate `index` under `master_seed`.
pub fn replicate_rng(master_seed: u64, index: u64) -> ReplicateRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    ReplicateRng(rng)
}

/// Runs grouped by stratum, strata in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strata {
    pub labels: Vec<String>,
    pub runs: Vec<Vec<usize>>,
}

impl Strata {
    pub fn new(d: &Dataset) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut runs: Vec<Vec<usize>> = Vec::new();
        let mut pos: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, run) in d.runs().iter().enumerate() {
            let label = d.stratum_of(&run.instance).ok_or_else(|| Error::InvalidDataset {
                violations: 1,
                first: format!("instance `{}`: has no stratum label", run.instance),
            })?;
            let slot = *pos.entry(label).or_insert_with(|| {
                labels.push(label.to_string());
                runs.push(Vec::new());
                labels.len() - 1
            });
            runs[slot].push(i);
        }
        Ok(Strata { labels, runs })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// `|R|` runs drawn i.i.d. uniformly with replacement.
pub fn draw_uniform_replicate(d: &Dataset, rng: &mut ReplicateRng) -> RunMultiset {
    let mut entries = Vec::with_capacity(d.num_runs());
    fill_uniform(d.num_runs(), rng, &mut entries);
    RunMultiset::new(entries)
}

/// Per stratum, as many runs as it has, drawn with replacement from within.
pub fn draw_stratified_replicate(strata: &Strata, rng: &mut ReplicateRng) -> RunMultiset {
    let mut entries = Vec::new();
    fill_stratified(strata, rng, &mut entries);
    RunMultiset::new(entries)
}

fn fill_uniform(n: usize, rng: &mut ReplicateRng, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..n).map(|_| rng.below(n)));
}

fn fill_stratified(strata: &Strata, rng: &mut ReplicateRng, out: &mut Vec<usize>) {
    out.clear();
    for group in &strata.runs {
        out.extend((0..group.len()).map(|_| group[rng.below(group.len())]));
    }
}

/// Where the replicate matrix came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub master_seed: u64,
    pub stratified: bool,
    pub mechanism: Mechanism,
}

/// `k` replicates × solvers of scores and per-row min-ranks, replicate-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    k: usize,
    solvers: Vec<String>,
    scores: Vec<f64>,
    ranks: Vec<u32>,
    provenance: Option<Provenance>,
}

impl ScoreMatrix {
    /// Assembles a matrix from score rows; ranks are derived per row.
    pub fn from_rows(solvers: Vec<String>, rows: &[Vec<f64>]) -> Self {
        let n = solvers.len();
        let mut scores = Vec::with_capacity(rows.len() * n);
        let mut ranks = Vec::with_capacity(rows.len() * n);
        for row in rows {
            assert_eq!(row.len(), n, "score row width must equal solver count");
            scores.extend_from_slice(row);
            ranks.extend(min_ranks(row));
        }
        ScoreMatrix { k: rows.len(), solvers, scores, ranks, provenance: None }
    }

    pub(crate) fn from_flat(
        solvers: Vec<String>,
        scores: Vec<f64>,
        ranks: Vec<u32>,
        provenance: Provenance,
    ) -> Self {
        let k = if solvers.is_empty() { 0 } else { scores.len() / solvers.len() };
        ScoreMatrix { k, solvers, scores, ranks, provenance: Some(provenance) }
    }

    pub fn replicates(&self) -> usize {
        self.k
    }

    pub fn num_solvers(&self) -> usize {
        self.solvers.len()
    }

    pub fn solvers(&self) -> &[String] {
        &self.solvers
    }

    pub fn solver_index(&self, id: &str) -> Option<usize> {
        self.solvers.iter().position(|s| s == id)
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    #[inline]
    pub fn score(&self, replicate: usize, solver: usize) -> f64 {
        self.scores[replicate * self.solvers.len() + solver]
    }

    #[inline]
    pub fn rank(&self, replicate: usize, solver: usize) -> u32 {
        self.ranks[replicate * self.solvers.len() + solver]
    }

    pub fn row(&self, replicate: usize) -> &[f64] {
        let n = self.solvers.len();
        &self.scores[replicate * n..(replicate + 1) * n]
    }

    pub fn rank_row(&self, replicate: usize) -> &[u32] {
        let n = self.solvers.len();
        &self.ranks[replicate * n..(replicate + 1) * n]
    }

    pub fn score_column(&self, solver: usize) -> Vec<f64> {
        (0..self.k).map(|i| self.score(i, solver)).collect()
    }

    pub fn rank_column(&self, solver: usize) -> Vec<u32> {
        (0..self.k).map(|i| self.rank(i, solver)).collect()
    }

    /// Raw replicate-major score storage.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }
}

/// Scores individual replicates; shareable across threads.
#[derive(Debug, Clone)]
pub struct ReplicateScorer {
    table: ContributionTable,
    strata: Option<Strata>,
    runs: usize,
    solvers: usize,
    master_seed: u64,
}

impl ReplicateScorer {
    pub fn new(d: &Dataset, cfg: &AnalysisConfig) -> Result<Self> {
        cfg.validate()?;
        let strata = if cfg.stratified { Some(Strata::new(d)?) } else { None };
        Ok(ReplicateScorer {
            table: ContributionTable::new(d, &cfg.mechanism),
            strata,
            runs: d.num_runs(),
            solvers: d.num_solvers(),
            master_seed: cfg.master_seed,
        })
    }

    /// The multiset drawn for replicate `index`.
    pub fn draw(&self, index: usize) -> RunMultiset {
        let mut entries = Vec::new();
        self.draw_into(index, &mut entries);
        RunMultiset::new(entries)
    }

    fn draw_into(&self, index: usize, entries: &mut Vec<usize>) {
        let mut rng = replicate_rng(self.master_seed, index as u64);
        match &self.strata {
            Some(strata) => fill_stratified(strata, &mut rng, entries),
            None => fill_uniform(self.runs, &mut rng, entries),
        }
    }

    /// Writes row `index` of the matrix into `scores` and `ranks`.
    pub fn score_replicate(
        &self,
        index: usize,
        entries: &mut Vec<usize>,
        scores: &mut [f64],
        ranks: &mut [u32],
    ) -> Result<()> {
        self.draw_into(index, entries);
        self.table
            .score_into(entries, scores)
            .map_err(|e| Error::Replicate { replicate: index, source: Box::new(e) })?;
        ranks.copy_from_slice(&min_ranks(scores));
        Ok(())
    }

    pub fn num_solvers(&self) -> usize {
        self.solvers
    }
}

/// Builds the matrix from already-computed rows laid out replicate-major.
pub fn assemble_score_matrix(
    d: &Dataset,
    cfg: &AnalysisConfig,
    scores: Vec<f64>,
    ranks: Vec<u32>,
) -> ScoreMatrix {
    ScoreMatrix::from_flat(
        d.solvers().to_vec(),
        scores,
        ranks,
        Provenance { master_seed: cfg.master_seed, stratified: cfg.stratified, mechanism: cfg.mechanism },
    )
}

/// Sequentially computes all `cfg.replicates` rows.
pub fn generate_score_matrix(d: &Dataset, cfg: &AnalysisConfig) -> Result<ScoreMatrix> {
    let scorer = ReplicateScorer::new(d, cfg)?;
    let n = d.num_solvers();
    let mut scores = vec![0.0; cfg.replicates * n];
    let mut ranks = vec![0u32; cfg.replicates * n];
    let mut entries = Vec::with_capacity(d.num_runs());
    for (i, (s, r)) in scores.chunks_mut(n).zip(ranks.chunks_mut(n)).enumerate() {
        scorer.score_replicate(i, &mut entries, s, r)?;
    }
    Ok(assemble_score_matrix(d, cfg, scores, ranks))
}
