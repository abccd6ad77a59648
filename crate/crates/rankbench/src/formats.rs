//! Run-results CSV, competition config JSON, and the self-contained dataset
//! JSON document.
//!
//! The CSV header is exactly `solver,instance,seed,status,cpu_time,quality`.
//! Solver and run order follow first appearance in the file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rankbench_core::{Dataset, DatasetBuilder, Reference, RunKey, RunRecord, RunStatus};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RUNS_CSV_HEADER: [&str; 6] = ["solver", "instance", "seed", "status", "cpu_time", "quality"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON; anything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub best_known_quality: f64,
    pub reference_time: f64,
}

/// Competition config JSON: cutoff, strata, and per-run reference data keyed
/// by `instance@seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionConfig {
    pub cutoff_seconds: f64,
    #[serde(default)]
    pub strata: BTreeMap<String, String>,
    #[serde(default)]
    pub reference: BTreeMap<String, ReferenceEntry>,
}

impl CompetitionConfig {
    pub fn from_dataset(d: &Dataset) -> Self {
        CompetitionConfig {
            cutoff_seconds: d.cutoff(),
            strata: d.strata().clone(),
            reference: d
                .reference()
                .iter()
                .map(|(k, r)| {
                    let entry = ReferenceEntry { best_known_quality: r.best_known_quality, reference_time: r.reference_time };
                    (k.to_string(), entry)
                })
                .collect(),
        }
    }

    fn reference_map(&self) -> Result<BTreeMap<RunKey, Reference>> {
        self.reference
            .iter()
            .map(|(key, r)| {
                let run = parse_run_key(key)?;
                Ok((run, Reference { best_known_quality: r.best_known_quality, reference_time: r.reference_time }))
            })
            .collect()
    }

    fn apply(&self, b: &mut DatasetBuilder) -> Result<()> {
        b.strata(self.strata.clone());
        b.reference(self.reference_map()?);
        Ok(())
    }
}

/// Splits `instance@seed` at the last `@`.
pub fn parse_run_key(key: &str) -> Result<RunKey> {
    let (instance, seed) = key
        .rsplit_once('@')
        .ok_or_else(|| Error::parse(format!("reference key `{key}`"), "expected `instance@seed`"))?;
    let seed = seed
        .parse()
        .map_err(|e| Error::parse(format!("reference key `{key}`"), format!("bad seed: {e}")))?;
    Ok(RunKey::new(instance, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ResultRow {
    solver: String,
    instance: String,
    seed: u64,
    status: String,
    cpu_time: f64,
    quality: Option<f64>,
}

impl ResultRow {
    fn from_dataset(d: &Dataset, s: usize, r: usize) -> Self {
        let rec = d.record(s, r);
        let run = &d.runs()[r];
        ResultRow {
            solver: d.solvers()[s].clone(),
            instance: run.instance.clone(),
            seed: run.seed,
            status: rec.status.as_str().to_string(),
            cpu_time: rec.cpu_time,
            quality: rec.quality,
        }
    }

    fn push_into(self, b: &mut DatasetBuilder, context: impl FnOnce() -> String) -> Result<()> {
        let status: RunStatus = self.status.parse().map_err(|e| Error::parse(context(), e))?;
        let record = RunRecord::new(status, self.cpu_time, self.quality);
        b.push(&self.solver, RunKey::new(self.instance, self.seed), record)?;
        Ok(())
    }
}

pub fn read_config<R: Read>(reader: R) -> Result<CompetitionConfig> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn read_config_file(path: &Path) -> Result<CompetitionConfig> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_config(BufReader::new(file))
        .map_err(|e| Error::parse(path.display().to_string(), e))
}

/// Reads the run-results CSV; `config` supplies cutoff, strata and reference data.
pub fn read_runs_csv<R: Read>(reader: R, config: &CompetitionConfig) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RUNS_CSV_HEADER) {
        return Err(Error::parse(
            "run-results CSV header",
            format!("expected `{}`, got `{}`", RUNS_CSV_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut b = DatasetBuilder::new(config.cutoff_seconds);
    for (i, row) in rdr.deserialize::<ResultRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::parse(format!("run-results CSV line {line}"), e))?;
        row.push_into(&mut b, || format!("run-results CSV line {line}"))?;
    }
    config.apply(&mut b)?;
    Ok(b.build()?)
}

pub fn write_runs_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(RUNS_CSV_HEADER)?;
    for r in 0..d.num_runs() {
        for s in 0..d.num_solvers() {
            w.serialize(ResultRow::from_dataset(d, s, r))?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// A complete dataset in one JSON document. Run order is explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DatasetDocument {
    #[serde(flatten)]
    config: CompetitionConfig,
    solvers: Vec<String>,
    runs: Vec<RunKeyJson>,
    results: Vec<ResultRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunKeyJson {
    instance: String,
    seed: u64,
}

pub fn read_dataset_json<R: Read>(reader: R) -> Result<Dataset> {
    let doc: DatasetDocument = serde_json::from_reader(reader)?;
    let mut b = DatasetBuilder::new(doc.config.cutoff_seconds);
    for s in &doc.solvers {
        b.declare_solver(s);
    }
    for r in &doc.runs {
        b.declare_run(&RunKey::new(r.instance.clone(), r.seed));
    }
    for (i, row) in doc.results.into_iter().enumerate() {
        row.push_into(&mut b, || format!("dataset JSON result #{i}"))?;
    }
    doc.config.apply(&mut b)?;
    Ok(b.build()?)
}

pub fn write_dataset_json<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let doc = DatasetDocument {
        config: CompetitionConfig::from_dataset(d),
        solvers: d.solvers().to_vec(),
        runs: d.runs().iter().map(|r| RunKeyJson { instance: r.instance.clone(), seed: r.seed }).collect(),
        results: (0..d.num_solvers())
            .flat_map(|s| (0..d.num_runs()).map(move |r| (s, r)))
            .map(|(s, r)| ResultRow::from_dataset(d, s, r))
            .collect(),
    };
    serde_json::to_writer_pretty(writer, &doc)?;
    Ok(())
}

pub fn write_config_json<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &CompetitionConfig::from_dataset(d))?;
    Ok(())
}

/// Loads a dataset from `path`. CSV input needs the competition config;
/// for JSON input the document carries its own.
pub fn load_dataset(path: &Path, format: Format, config: Option<&Path>) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let with_path = |e: Error| match e {
        Error::Csv(e) => Error::parse(path.display().to_string(), e),
        Error::Json(e) => Error::parse(path.display().to_string(), e),
        Error::Parse { context, message } => Error::parse(format!("{}: {context}", path.display()), message),
        other => other,
    };
    match format {
        Format::Csv => {
            let config_path = config.ok_or_else(|| {
                Error::parse(path.display().to_string(), "CSV input needs a competition config (--config)")
            })?;
            let config = read_config_file(config_path)?;
            read_runs_csv(reader, &config).map_err(with_path)
        }
        Format::Json => read_dataset_json(reader).map_err(with_path),
    }
}

/// Writes `d` as a runs CSV at `path` plus its config at `<stem>.config.json`,
/// or as one JSON document.
pub fn save_dataset(d: &Dataset, path: &Path, format: Format) -> Result<()> {
    let create = |p: &Path| File::create(p).map(BufWriter::new).map_err(|e| Error::io(p, e));
    match format {
        Format::Csv => {
            write_runs_csv(d, create(path)?)?;
            let config_path = path.with_extension("config.json");
            write_config_json(d, create(&config_path)?)
        }
        Format::Json => write_dataset_json(d, create(path)?),
    }
}
