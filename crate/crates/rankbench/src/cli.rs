//! `rankbench` command line.
//!
//! Exit codes: 0 on success, 1 for data or I/O errors, 2 for usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rankbench_core::{baseline, AnalysisConfig, Dataset, Mechanism, RunMultiset, TiebreakKey};
use serde::Serialize;

use crate::formats::{load_dataset, Format};
use crate::report::{self, SensitivitySection};
use crate::{parallel, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "rankbench", version, about = "Bootstrap-based robust ranking of solver competitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline: score matrix, confidence intervals, robust ranking, diagnostics.
    Analyze(AnalyzeArgs),
    /// Leave-one-instance-out sensitivity of the official ranking.
    Sensitivity(SensitivityArgs),
    /// Official scores and ranking only.
    Score(ScoreArgs),
    /// Dump the bootstrap score matrix as CSV.
    Matrix(MatrixArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stratified {
    /// On when the dataset declares at least two strata.
    Auto,
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Run results: CSV (with --config) or a JSON dataset document.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Competition config JSON (cutoff, strata, reference data). Required for CSV input.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    /// Scoring mechanism.
    #[arg(long, value_parser = PossibleValuesParser::new(Mechanism::IDS))]
    pub mechanism: String,
    /// Penalty factor for par_k.
    #[arg(long, default_value_t = 10)]
    pub par_k: u32,
    /// Comma-separated secondary keys ordering tied solvers in listings.
    #[arg(long, value_delimiter = ',', value_parser = PossibleValuesParser::new(["total_time", "solver_id"]))]
    pub tiebreak: Vec<String>,
    /// Worker threads; defaults to all cores. Never affects output.
    #[arg(long, env = "RANKBENCH_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 10_000, value_parser = positive_usize)]
    pub replicates: usize,
    /// Master seed of the replicate streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stratified resampling.
    #[arg(long, value_enum, default_value_t = Stratified::Auto)]
    pub stratified: Stratified,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Significance level of intervals and tests.
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    pub alpha: f64,
    /// Report JSON destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write CSV tables into this directory.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
    /// Write confidence-interval plot data (CSV) here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Solvers included in the plot data.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Fold the leave-one-instance-out analysis into the report.
    #[arg(long)]
    pub with_sensitivity: bool,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// Per-instance flag CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Aggregate counts JSON destination.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// Ranking CSV destination; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    /// Matrix CSV destination.
    #[arg(long)]
    pub output: PathBuf,
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a < 1.0 => Ok(a),
        Ok(_) => Err("must lie strictly between 0 and 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        let format = match self.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Json) => Format::Json,
            None => Format::from_path(&self.input),
        };
        load_dataset(&self.input, format, self.config.as_deref())
    }
}

impl ScoringArgs {
    fn config(&self) -> Result<AnalysisConfig> {
        let mut cfg = AnalysisConfig::new(Mechanism::from_id(&self.mechanism, f64::from(self.par_k))?);
        cfg.tiebreak = self.tiebreak.iter().map(|t| TiebreakKey::from_id(t)).collect::<rankbench_core::Result<_>>()?;
        Ok(cfg)
    }

    fn threads(&self) -> Option<usize> {
        self.threads.map(|t| t as usize)
    }
}

impl BootstrapArgs {
    fn apply(&self, cfg: &mut AnalysisConfig, d: &Dataset) {
        cfg.replicates = self.replicates;
        cfg.master_seed = self.seed;
        cfg.stratified = match self.stratified {
            Stratified::Auto => d.num_strata() >= 2,
            Stratified::On => true,
            Stratified::Off => false,
        };
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Score(a) => score(a),
        Command::Matrix(a) => matrix(a),
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<()> {
    let d = a.input.load()?;
    let mut cfg = a.scoring.config()?;
    a.bootstrap.apply(&mut cfg, &d);
    cfg.alpha = a.alpha;
    let r = parallel::with_threads(a.scoring.threads(), || -> Result<_> {
        let m = parallel::generate_score_matrix(&d, &cfg)?;
        let sens = if a.with_sensitivity { Some(parallel::leave_one_out_analysis(&d, &cfg)?) } else { None };
        report::build_report(&d, &cfg, &m, sens.as_ref())
    })?;
    match &a.output {
        Some(path) => report::emit_json(&r, path)?,
        None => write_stdout(report::to_canonical_json(&r)?.as_bytes())?,
    }
    if let Some(dir) = &a.csv_dir {
        report::emit_csv(&r, dir)?;
    }
    if let Some(path) = &a.plot_data {
        report::emit_plot_data(&r, path, a.top)?;
    }
    Ok(())
}

fn sensitivity(a: &SensitivityArgs) -> Result<()> {
    let d = a.input.load()?;
    let cfg = a.scoring.config()?;
    let s = parallel::with_threads(a.scoring.threads(), || parallel::leave_one_out_analysis(&d, &cfg))?;
    let section = SensitivitySection::new(&s);
    match &a.output {
        Some(path) => report::emit_sensitivity_csv(&section, path)?,
        None => report::write_sensitivity_csv(&section, io::stdout().lock())?,
    }
    let summary = report::to_canonical_json(&section.counts)?;
    match &a.summary {
        Some(path) => write_file(path, summary.as_bytes())?,
        None => eprint!("{summary}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct ScoreRow<'a> {
    solver: &'a str,
    official_rank: u32,
    official_score: f64,
    total_time: f64,
}

fn score(a: &ScoreArgs) -> Result<()> {
    let d = a.input.load()?;
    let cfg = a.scoring.config()?;
    let (scores, ranking) = baseline(&d, &cfg)?;
    let full = RunMultiset::full(&d);
    let text = csv_to_string(|w| {
        for &s in &ranking.order {
            let total_time = full.entries.iter().map(|&r| d.record(s, r).cpu_time).sum();
            w.serialize(ScoreRow {
                solver: &d.solvers()[s],
                official_rank: ranking.ranks[s],
                official_score: scores.scores[s],
                total_time,
            })?;
        }
        Ok(())
    })?;
    match &a.output {
        Some(path) => write_file(path, text.as_bytes()),
        None => write_stdout(text.as_bytes()),
    }
}

fn matrix(a: &MatrixArgs) -> Result<()> {
    let d = a.input.load()?;
    let mut cfg = a.scoring.config()?;
    a.bootstrap.apply(&mut cfg, &d);
    let m = parallel::with_threads(a.scoring.threads(), || parallel::generate_score_matrix(&d, &cfg))?;
    report::write_matrix_csv(&m, &a.output)
}

fn csv_to_string(f: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    f(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::parse("csv", e.error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    w.write_all(bytes).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Error::io("<stdout>", e))
}
