//! Command-line front end and file formats for `rankbench-core`.
//!
//! The analysis itself lives in the core crate; this crate adds dataset
//! ingestion, rayon-parallel drivers with output identical to the sequential
//! ones, report emission and the `rankbench` binary.

pub mod cli;
mod error;
pub mod formats;
pub mod parallel;
pub mod report;

pub use error::{Error, Result};
pub use rankbench_core as core;
