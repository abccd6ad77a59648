use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A (solver, run) result was supplied twice.
    DuplicateResult { solver: String, instance: String, seed: u64 },
    /// The results table has no entry for this (solver, run) pair.
    MissingResult { solver: String, instance: String, seed: u64 },
    /// The dataset failed validation; the first violation is carried along.
    InvalidDataset { violations: usize, first: String },
    /// A mechanism needs per-run reference data that is absent.
    MissingReference { instance: String, seed: u64, field: &'static str },
    /// A mechanism needs a quality value that is absent.
    MissingQuality { solver: String, instance: String, seed: u64 },
    UnknownMechanism(String),
    UnknownTiebreak(String),
    UnknownSolver(String),
    InvalidConfig(String),
    /// Scoring failed while building replicate `replicate`.
    Replicate { replicate: usize, source: alloc::boxed::Box<Error> },
    DepthOutOfRange { depth: usize, solvers: usize },
    EmptySample,
    /// Matrix provenance does not match the analysis configuration.
    ProvenanceMismatch(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateResult { solver, instance, seed } => {
                write!(f, "duplicate result for solver `{solver}` on run {instance}@{seed}")
            }
            Error::MissingResult { solver, instance, seed } => {
                write!(f, "missing result for solver `{solver}` on run {instance}@{seed}")
            }
            Error::InvalidDataset { violations, first } => {
                write!(f, "dataset has {violations} violation(s); first: {first}")
            }
            Error::MissingReference { instance, seed, field } => {
                write!(f, "run {instance}@{seed} has no reference `{field}`")
            }
            Error::MissingQuality { solver, instance, seed } => {
                write!(f, "solver `{solver}` has no quality value on run {instance}@{seed}")
            }
            Error::UnknownMechanism(id) => write!(f, "unknown scoring mechanism `{id}`"),
            Error::UnknownTiebreak(id) => write!(f, "unknown tiebreak key `{id}`"),
            Error::UnknownSolver(id) => write!(f, "unknown solver `{id}`"),
            Error::InvalidConfig(msg) => write!(f, "invalid analysis config: {msg}"),
            Error::Replicate { replicate, source } => {
                write!(f, "replicate {replicate}: {source}")
            }
            Error::DepthOutOfRange { depth, solvers } => {
                write!(f, "ranking depth {depth} outside 1..={solvers}")
            }
            Error::EmptySample => f.write_str("sample is empty"),
            Error::ProvenanceMismatch(msg) => write!(f, "score matrix provenance mismatch: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
