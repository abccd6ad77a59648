//! Competition data model: solvers, runs, per-run results, strata and
//! reference data, plus the analysis configuration shared by every stage.
//!
//! A [`Dataset`] is a *total* table: every solver has exactly one
//! [`RunRecord`] for every run. Runs (instance × seed) are the resampling
//! unit; a dataset with one seed per instance degenerates to instance
//! resampling.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::scoring::{Mechanism, TiebreakKey};
use crate::{Error, Result};

/// Stratum label given to every instance when the input declares no strata.
pub const DEFAULT_STRATUM: &str = "default";

/// Outcome class of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunStatus {
    Solved,
    SolvedOptimal,
    Unsolved,
    Timeout,
    Crashed,
    Incorrect,
}

impl RunStatus {
    pub const ALL: [RunStatus; 6] = [
        RunStatus::Solved,
        RunStatus::SolvedOptimal,
        RunStatus::Unsolved,
        RunStatus::Timeout,
        RunStatus::Crashed,
        RunStatus::Incorrect,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Solved => "solved",
            RunStatus::SolvedOptimal => "solved_optimal",
            RunStatus::Unsolved => "unsolved",
            RunStatus::Timeout => "timeout",
            RunStatus::Crashed => "crashed",
            RunStatus::Incorrect => "incorrect",
        }
    }

    /// `solved` or `solved_optimal`. Every other status contributes no
    /// success to any mechanism.
    pub fn is_solved(self) -> bool {
        matches!(self, RunStatus::Solved | RunStatus::SolvedOptimal)
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunStatus {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        RunStatus::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown run status `{s}`"))
    }
}

/// One run of the benchmark: an instance executed with a given seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunKey {
    pub instance: String,
    pub seed: u64,
}

impl RunKey {
    pub fn new(instance: impl Into<String>, seed: u64) -> Self {
        RunKey { instance: instance.into(), seed }
    }
}

impl fmt::Display for RunKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.instance, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub status: RunStatus,
    /// CPU seconds.
    pub cpu_time: f64,
    /// Solution cost or accuracy; units depend on the mechanism.
    pub quality: Option<f64>,
}

impl RunRecord {
    pub fn new(status: RunStatus, cpu_time: f64, quality: Option<f64>) -> Self {
        RunRecord { status, cpu_time, quality }
    }

    /// Solved with a time inside the cutoff.
    pub fn succeeded(&self, cutoff: f64) -> bool {
        self.status.is_solved() && self.cpu_time <= cutoff
    }
}

/// Per-run reference data used by the IPC-style mechanisms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub best_known_quality: f64,
    pub reference_time: f64,
}

/// The full result table of one competition track.
///
/// Solver and run order is the input order and fixes column/row meaning
/// everywhere downstream. Results are stored solver-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    solvers: Vec<String>,
    runs: Vec<RunKey>,
    strata: BTreeMap<String, String>,
    results: Vec<RunRecord>,
    cutoff: f64,
    reference: BTreeMap<RunKey, Reference>,
}

impl Dataset {
    /// Assembles a dataset without validating it.
    ///
    /// `results` must be solver-major with `solvers.len() * runs.len()`
    /// entries; that is the only thing checked here. Use
    /// [`validate_dataset`] or [`DatasetBuilder`] for the full checks.
    pub fn from_parts(
        solvers: Vec<String>,
        runs: Vec<RunKey>,
        strata: BTreeMap<String, String>,
        results: Vec<RunRecord>,
        cutoff: f64,
        reference: BTreeMap<RunKey, Reference>,
    ) -> Result<Self> {
        if results.len() != solvers.len() * runs.len() {
            return Err(Error::InvalidDataset {
                violations: 1,
                first: format!(
                    "results table has {} entries, expected {} solvers x {} runs",
                    results.len(),
                    solvers.len(),
                    runs.len()
                ),
            });
        }
        Ok(Dataset { solvers, runs, strata, results, cutoff, reference })
    }

    pub fn solvers(&self) -> &[String] {
        &self.solvers
    }

    pub fn runs(&self) -> &[RunKey] {
        &self.runs
    }

    pub fn strata(&self) -> &BTreeMap<String, String> {
        &self.strata
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn reference(&self) -> &BTreeMap<RunKey, Reference> {
        &self.reference
    }

    pub fn num_solvers(&self) -> usize {
        self.solvers.len()
    }

    pub fn num_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn solver_index(&self, id: &str) -> Option<usize> {
        self.solvers.iter().position(|s| s == id)
    }

    #[inline]
    pub fn record(&self, solver: usize, run: usize) -> &RunRecord {
        &self.results[solver * self.runs.len() + run]
    }

    pub fn reference_for(&self, run: usize) -> Option<&Reference> {
        self.reference.get(&self.runs[run])
    }

    pub fn stratum_of(&self, instance: &str) -> Option<&str> {
        self.strata.get(instance).map(String::as_str)
    }

    /// Distinct instances in first-appearance order, each with the indices
    /// of its runs.
    pub fn instances(&self) -> Vec<(&str, Vec<usize>)> {
        let mut out: Vec<(&str, Vec<usize>)> = Vec::new();
        let mut pos: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, run) in self.runs.iter().enumerate() {
            let slot = *pos.entry(run.instance.as_str()).or_insert_with(|| {
                out.push((run.instance.as_str(), Vec::new()));
                out.len() - 1
            });
            out[slot].1.push(i);
        }
        out
    }

    /// Number of distinct stratum labels used by the runs.
    pub fn num_strata(&self) -> usize {
        self.runs
            .iter()
            .filter_map(|r| self.stratum_of(&r.instance))
            .collect::<BTreeSet<_>>()
            .len()
    }
}

/// Incrementally collects result rows and produces a validated [`Dataset`].
///
/// Solvers and runs are ordered by first appearance unless declared up
/// front with [`DatasetBuilder::declare_solver`] / [`DatasetBuilder::declare_run`].
#[derive(Debug, Clone)]
pub struct DatasetBuilder {
    cutoff: f64,
    solvers: Vec<String>,
    solver_pos: BTreeMap<String, usize>,
    runs: Vec<RunKey>,
    run_pos: BTreeMap<RunKey, usize>,
    cells: BTreeMap<(usize, usize), RunRecord>,
    strata: BTreeMap<String, String>,
    reference: BTreeMap<RunKey, Reference>,
}

impl DatasetBuilder {
    pub fn new(cutoff: f64) -> Self {
        DatasetBuilder {
            cutoff,
            solvers: Vec::new(),
            solver_pos: BTreeMap::new(),
            runs: Vec::new(),
            run_pos: BTreeMap::new(),
            cells: BTreeMap::new(),
            strata: BTreeMap::new(),
            reference: BTreeMap::new(),
        }
    }

    pub fn declare_solver(&mut self, solver: &str) -> usize {
        if let Some(&i) = self.solver_pos.get(solver) {
            return i;
        }
        self.solvers.push(solver.to_string());
        self.solver_pos.insert(solver.to_string(), self.solvers.len() - 1);
        self.solvers.len() - 1
    }

    pub fn declare_run(&mut self, run: &RunKey) -> usize {
        if let Some(&i) = self.run_pos.get(run) {
            return i;
        }
        self.runs.push(run.clone());
        self.run_pos.insert(run.clone(), self.runs.len() - 1);
        self.runs.len() - 1
    }

    pub fn push(&mut self, solver: &str, run: RunKey, record: RunRecord) -> Result<&mut Self> {
        let s = self.declare_solver(solver);
        let r = self.declare_run(&run);
        if self.cells.insert((s, r), record).is_some() {
            return Err(Error::DuplicateResult {
                solver: solver.to_string(),
                instance: run.instance,
                seed: run.seed,
            });
        }
        Ok(self)
    }

    pub fn strata(&mut self, strata: BTreeMap<String, String>) -> &mut Self {
        self.strata = strata;
        self
    }

    pub fn reference(&mut self, reference: BTreeMap<RunKey, Reference>) -> &mut Self {
        self.reference = reference;
        self
    }

    /// Checks completeness, fills the default stratum when none was given,
    /// and rejects datasets with any [`validate_dataset`] violation.
    pub fn build(self) -> Result<Dataset> {
        let DatasetBuilder { cutoff, solvers, runs, mut cells, mut strata, reference, .. } = self;
        let mut results = Vec::with_capacity(solvers.len() * runs.len());
        for (s, solver) in solvers.iter().enumerate() {
            for (r, run) in runs.iter().enumerate() {
                match cells.remove(&(s, r)) {
                    Some(rec) => results.push(rec),
                    None => {
                        return Err(Error::MissingResult {
                            solver: solver.clone(),
                            instance: run.instance.clone(),
                            seed: run.seed,
                        })
                    }
                }
            }
        }
        if strata.is_empty() {
            for run in &runs {
                strata.insert(run.instance.clone(), DEFAULT_STRATUM.to_string());
            }
        }
        let dataset = Dataset::from_parts(solvers, runs, strata, results, cutoff, reference)?;
        let violations = validate_dataset(&dataset);
        if let Some(first) = violations.first() {
            return Err(Error::InvalidDataset { violations: violations.len(), first: first.to_string() });
        }
        Ok(dataset)
    }
}

/// One broken dataset invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl Violation {
    fn new(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { subject: subject.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

fn finite_non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Lists every broken dataset or record invariant. Empty iff the dataset
/// is valid.
pub fn validate_dataset(d: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    if d.solvers.len() < 2 {
        out.push(Violation::new("dataset", format!("needs at least 2 solvers, has {}", d.solvers.len())));
    }
    if d.runs.is_empty() {
        out.push(Violation::new("dataset", "needs at least 1 run"));
    }
    if !(d.cutoff.is_finite() && d.cutoff > 0.0) {
        out.push(Violation::new("dataset", format!("cutoff must be a positive number, got {}", d.cutoff)));
    }
    let mut seen = BTreeSet::new();
    for s in &d.solvers {
        if !seen.insert(s.as_str()) {
            out.push(Violation::new(format!("solver `{s}`"), "listed more than once"));
        }
    }
    let mut seen = BTreeSet::new();
    for r in &d.runs {
        if !seen.insert(r) {
            out.push(Violation::new(format!("run {r}"), "listed more than once"));
        }
    }

    let mut missing_stratum = BTreeSet::new();
    for r in &d.runs {
        if !d.strata.contains_key(&r.instance) && missing_stratum.insert(r.instance.as_str()) {
            out.push(Violation::new(format!("instance `{}`", r.instance), "has no stratum label"));
        }
    }

    for (key, reference) in &d.reference {
        if !seen.contains(key) {
            out.push(Violation::new(format!("reference {key}"), "refers to an unknown run"));
        }
        if !(reference.best_known_quality.is_finite() && reference.best_known_quality > 0.0) {
            out.push(Violation::new(format!("reference {key}"), "best_known_quality must be > 0"));
        }
        if !(reference.reference_time.is_finite() && reference.reference_time > 0.0) {
            out.push(Violation::new(format!("reference {key}"), "reference_time must be > 0"));
        }
    }

    let nr = d.runs.len();
    if d.results.len() == d.solvers.len() * nr {
        for (s, solver) in d.solvers.iter().enumerate() {
            for (r, run) in d.runs.iter().enumerate() {
                let rec = &d.results[s * nr + r];
                let subject = || format!("solver `{solver}` run {run}");
                if !finite_non_negative(rec.cpu_time) {
                    out.push(Violation::new(subject(), format!("cpu_time must be finite and >= 0, got {}", rec.cpu_time)));
                }
                if let Some(q) = rec.quality {
                    if !finite_non_negative(q) {
                        out.push(Violation::new(subject(), format!("quality must be finite and >= 0, got {q}")));
                    } else if rec.status.is_solved() {
                        if let Some(reference) = d.reference.get(run) {
                            if q < reference.best_known_quality {
                                out.push(Violation::new(
                                    subject(),
                                    format!(
                                        "reference inconsistency: quality {q} is better than best_known_quality {}",
                                        reference.best_known_quality
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
        }
    } else {
        out.push(Violation::new("dataset", "results table is not solvers x runs"));
    }
    out
}

/// Everything that parameterises one analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub mechanism: Mechanism,
    pub replicates: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub stratified: bool,
    pub tiebreak: Vec<TiebreakKey>,
}

impl AnalysisConfig {
    pub const DEFAULT_REPLICATES: usize = 10_000;
    pub const DEFAULT_ALPHA: f64 = 0.05;

    pub fn new(mechanism: Mechanism) -> Self {
        AnalysisConfig {
            mechanism,
            replicates: Self::DEFAULT_REPLICATES,
            alpha: Self::DEFAULT_ALPHA,
            master_seed: 0,
            stratified: false,
            tiebreak: vec![],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicate count must be at least 1".to_string()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if let Mechanism::ParK(k) = self.mechanism {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::InvalidConfig(format!("PAR penalty factor must be >= 0, got {k}")));
            }
        }
        Ok(())
    }
}
