//! Machine-readable analysis report: canonical JSON, CSV tables and plot data.
//!
//! Per-solver rows are listed in official order. The report embeds enough
//! raw material (official ranks, group membership, rank quartiles) for every
//! diagnostic to be recomputed from it; [`check_report`] does exactly that.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rankbench_core::{
    baseline, empirical_win_fractions, inversion_count, mean_rank_iqr, mean_score_iqr, median_scores,
    nearest_rank, percentile_ci, robust_ranking, tied_pair_count, AnalysisConfig, Dataset, Mechanism,
    ScoreMatrix, SensitivityReport,
};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mechanism: String,
    pub par_k: Option<f64>,
    pub replicates: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub stratified: bool,
    pub tiebreak: Vec<String>,
}

impl ConfigEcho {
    fn new(cfg: &AnalysisConfig) -> Self {
        ConfigEcho {
            mechanism: cfg.mechanism.id().to_string(),
            par_k: match cfg.mechanism {
                Mechanism::ParK(k) => Some(k),
                _ => None,
            },
            replicates: cfg.replicates,
            alpha: cfg.alpha,
            master_seed: cfg.master_seed,
            stratified: cfg.stratified,
            tiebreak: cfg.tiebreak.iter().map(|t| t.id().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub solvers: usize,
    pub runs: usize,
    pub instances: usize,
    pub strata: usize,
    pub cutoff_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRow {
    pub solver: String,
    pub official_rank: u32,
    pub official_score: f64,
    pub median_score: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub win_count: usize,
    pub win_fraction: f64,
    pub group: usize,
    pub fractional_rank: f64,
    pub rank_q25: u32,
    pub rank_q75: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub index: usize,
    pub fractional_rank: f64,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub solver: String,
    pub p_value: f64,
    pub threshold: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub winner: String,
    pub tests: Vec<PairTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScopeDiagnostics {
    pub solvers: Vec<String>,
    pub groups: usize,
    pub tied_pairs: u64,
    pub inversions: usize,
    /// `[worse official rank, better group]` pairs.
    pub inversion_pairs: Vec<[String; 2]>,
    pub mean_rank_iqr: f64,
    pub mean_score_iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub all: ScopeDiagnostics,
    pub top10: ScopeDiagnostics,
    pub top3: ScopeDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCountsRow {
    pub instances: usize,
    pub any_change: usize,
    pub rank_change: usize,
    pub top10_comp: usize,
    pub top10_order: usize,
    pub top3_comp: usize,
    pub top3_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub instance: String,
    pub any_change: bool,
    pub rank_change: bool,
    pub top10_comp: bool,
    pub top10_order: bool,
    pub top3_comp: bool,
    pub top3_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySection {
    pub counts: SensitivityCountsRow,
    pub instances: Vec<InstanceRow>,
}

impl SensitivitySection {
    pub fn new(s: &SensitivityReport) -> Self {
        let c = &s.counts;
        SensitivitySection {
            counts: SensitivityCountsRow {
                instances: c.instances,
                any_change: c.any_change,
                rank_change: c.rank_change,
                top10_comp: c.top10_comp,
                top10_order: c.top10_order,
                top3_comp: c.top3_comp,
                top3_order: c.top3_order,
            },
            instances: s
                .instances
                .iter()
                .map(|f| InstanceRow {
                    instance: f.instance.clone(),
                    any_change: f.any_change,
                    rank_change: f.rank_change,
                    top10_comp: f.top10_comp,
                    top10_order: f.top10_order,
                    top3_comp: f.top3_comp,
                    top3_order: f.top3_order,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub solvers: Vec<SolverRow>,
    pub groups: Vec<GroupRow>,
    pub iterations: Vec<IterationRow>,
    pub diagnostics: Diagnostics,
    pub sensitivity: Option<SensitivitySection>,
}

fn check_provenance(d: &Dataset, cfg: &AnalysisConfig, m: &ScoreMatrix) -> Result<()> {
    let mismatch = |msg: String| Err(rankbench_core::Error::ProvenanceMismatch(msg).into());
    let Some(p) = m.provenance() else {
        return mismatch("matrix carries no provenance".into());
    };
    if p.master_seed != cfg.master_seed {
        return mismatch(format!("seed {} vs configured {}", p.master_seed, cfg.master_seed));
    }
    if p.stratified != cfg.stratified {
        return mismatch(format!("stratified {} vs configured {}", p.stratified, cfg.stratified));
    }
    if p.mechanism != cfg.mechanism {
        return mismatch(format!("mechanism {} vs configured {}", p.mechanism, cfg.mechanism));
    }
    if m.replicates() != cfg.replicates {
        return mismatch(format!("{} replicates vs configured {}", m.replicates(), cfg.replicates));
    }
    if m.solvers() != d.solvers() {
        return mismatch("solver columns differ from the dataset".into());
    }
    Ok(())
}

/// Assembles every analysis product for one matrix.
pub fn build_report(
    d: &Dataset,
    cfg: &AnalysisConfig,
    m: &ScoreMatrix,
    sensitivity: Option<&SensitivityReport>,
) -> Result<AnalysisReport> {
    cfg.validate()?;
    check_provenance(d, cfg, m)?;
    let ids = d.solvers();
    let (official_scores, official) = baseline(d, cfg)?;
    let medians = median_scores(m);
    let wins = empirical_win_fractions(m);
    let robust = robust_ranking(m, cfg.alpha);
    let group_of = robust.group_of();
    let frac_of = robust.fractional_rank_of();

    let mut solvers = Vec::with_capacity(ids.len());
    for &s in &official.order {
        let ci = percentile_ci(&m.score_column(s), cfg.alpha)?;
        let mut ranks = m.rank_column(s);
        ranks.sort_unstable();
        solvers.push(SolverRow {
            solver: ids[s].clone(),
            official_rank: official.ranks[s],
            official_score: official_scores.scores[s],
            median_score: medians[s],
            ci_lower: ci.lower,
            ci_upper: ci.upper,
            win_count: wins.counts[s],
            win_fraction: wins.fractions[s],
            group: group_of[s],
            fractional_rank: frac_of[s],
            rank_q25: nearest_rank(&ranks, 0.25),
            rank_q75: nearest_rank(&ranks, 0.75),
        });
    }

    let groups = robust
        .groups
        .iter()
        .map(|g| GroupRow {
            index: g.index,
            fractional_rank: g.fractional_rank,
            members: g.members.iter().map(|&s| ids[s].clone()).collect(),
        })
        .collect();

    let iterations = robust
        .iterations
        .iter()
        .map(|it| IterationRow {
            winner: ids[it.winner].clone(),
            tests: it
                .candidates
                .iter()
                .enumerate()
                .map(|(j, &c)| PairTest {
                    solver: ids[c].clone(),
                    p_value: it.p_values[j],
                    threshold: it.thresholds[j],
                    rejected: it.rejected.contains(&c),
                })
                .collect(),
        })
        .collect();

    let scope = |depth: Option<usize>| {
        let members: Vec<usize> = match depth {
            Some(n) => official.order.iter().copied().take(n).collect(),
            None => official.order.clone(),
        };
        let subset = depth.map(|_| members.as_slice());
        let inv = inversion_count(&official, &robust, subset);
        ScopeDiagnostics {
            solvers: members.iter().map(|&s| ids[s].clone()).collect(),
            groups: robust.group_count(subset),
            tied_pairs: tied_pair_count(&robust, subset),
            inversions: inv.count(),
            inversion_pairs: inv.pairs.iter().map(|&(a, b)| [ids[a].clone(), ids[b].clone()]).collect(),
            mean_rank_iqr: mean_rank_iqr(m, subset),
            mean_score_iqr: mean_score_iqr(m, subset),
        }
    };
    let diagnostics = Diagnostics { all: scope(None), top10: scope(Some(10)), top3: scope(Some(3)) };

    Ok(AnalysisReport {
        config: ConfigEcho::new(cfg),
        dataset: DatasetSummary {
            solvers: d.num_solvers(),
            runs: d.num_runs(),
            instances: d.instances().len(),
            strata: d.num_strata(),
            cutoff_seconds: d.cutoff(),
        },
        solvers,
        groups,
        iterations,
        diagnostics,
        sensitivity: sensitivity.map(SensitivitySection::new),
    })
}

/// Recomputes every diagnostic from the report's raw sections and lists
/// any disagreement. Empty means self-consistent.
pub fn check_report(r: &AnalysisReport) -> Vec<String> {
    let mut issues = Vec::new();
    let names: Vec<&str> = r.solvers.iter().map(|s| s.solver.as_str()).collect();
    let unique: BTreeSet<&str> = names.iter().copied().collect();
    if unique.len() != names.len() || names.len() != r.dataset.solvers {
        issues.push("per-solver rows do not list every solver exactly once".to_string());
    }
    let grouped: Vec<&str> = r.groups.iter().flat_map(|g| g.members.iter().map(String::as_str)).collect();
    if grouped.len() != names.len() || grouped.iter().copied().collect::<BTreeSet<_>>() != unique {
        issues.push("groups do not partition the solvers".to_string());
    }
    let row = |name: &str| r.solvers.iter().find(|s| s.solver == name);

    for (i, g) in r.groups.iter().enumerate() {
        if g.index != i + 1 {
            issues.push(format!("group {} out of sequence", g.index));
        }
        for m in &g.members {
            match row(m) {
                Some(s) if s.group == g.index && s.fractional_rank == g.fractional_rank => {}
                _ => issues.push(format!("solver `{m}` disagrees with group {}", g.index)),
            }
        }
    }
    let n = names.len() as f64;
    let rank_sum: f64 = r.solvers.iter().map(|s| s.fractional_rank).sum();
    if (rank_sum - n * (n + 1.0) / 2.0).abs() > 1e-9 {
        issues.push(format!("fractional ranks sum to {rank_sum}"));
    }

    let k = r.config.replicates as f64;
    for s in &r.solvers {
        if !(s.ci_lower <= s.median_score && s.median_score <= s.ci_upper) {
            issues.push(format!("solver `{}`: median outside its interval", s.solver));
        }
        if s.win_fraction != s.win_count as f64 / k {
            issues.push(format!("solver `{}`: win fraction disagrees with count", s.solver));
        }
    }
    for w in r.solvers.windows(2) {
        if w[0].official_score < w[1].official_score {
            issues.push("per-solver rows are not in official order".to_string());
        }
    }

    let scopes = [("all", &r.diagnostics.all, r.solvers.len()), ("top10", &r.diagnostics.top10, 10), ("top3", &r.diagnostics.top3, 3)];
    for (label, diag, depth) in scopes {
        let members: Vec<&SolverRow> = r.solvers.iter().take(depth).collect();
        if diag.solvers.iter().map(String::as_str).ne(members.iter().map(|s| s.solver.as_str())) {
            issues.push(format!("{label}: scope members differ from the official listing"));
        }
        let groups: BTreeSet<usize> = members.iter().map(|s| s.group).collect();
        if groups.len() != diag.groups {
            issues.push(format!("{label}: groups {} vs recomputed {}", diag.groups, groups.len()));
        }
        let tied = groups
            .iter()
            .map(|&g| {
                let c = members.iter().filter(|s| s.group == g).count() as u64;
                c * c.saturating_sub(1) / 2
            })
            .sum::<u64>();
        if tied != diag.tied_pairs {
            issues.push(format!("{label}: tied pairs {} vs recomputed {tied}", diag.tied_pairs));
        }
        let mut pairs = Vec::new();
        for a in &members {
            for b in &members {
                if a.official_rank > b.official_rank && a.group < b.group {
                    pairs.push([a.solver.clone(), b.solver.clone()]);
                }
            }
        }
        let mut reported = diag.inversion_pairs.clone();
        reported.sort();
        pairs.sort();
        if pairs != reported || pairs.len() != diag.inversions {
            issues.push(format!("{label}: inversions {} vs recomputed {}", diag.inversions, pairs.len()));
        }
        let iqr = if members.is_empty() {
            0.0
        } else {
            members.iter().map(|s| f64::from(s.rank_q75 - s.rank_q25)).sum::<f64>() / members.len() as f64
        };
        if (iqr - diag.mean_rank_iqr).abs() > 1e-9 {
            issues.push(format!("{label}: mean rank IQR {} vs recomputed {iqr}", diag.mean_rank_iqr));
        }
    }

    for it in &r.iterations {
        for t in &it.tests {
            if t.rejected && t.p_value >= t.threshold {
                issues.push(format!("iteration won by `{}`: `{}` rejected above its threshold", it.winner, t.solver));
            }
        }
    }
    issues
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Canonical JSON: sorted keys, shortest round-trip floats, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_json(r: &AnalysisReport, path: &Path) -> Result<()> {
    let text = to_canonical_json(r)?;
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn finish<W: Write>(w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .flush()
        .map_err(|e| Error::io(path, e))
}

/// Writes `solvers.csv`, `groups.csv` and `diagnostics.csv` (plus
/// `sensitivity.csv` when present) into `dir`.
pub fn emit_csv(r: &AnalysisReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join("solvers.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record([
        "solver", "official_rank", "official_score", "median_score", "ci_lower", "ci_upper", "win_count",
        "win_fraction", "group", "fractional_rank", "rank_q25", "rank_q75",
    ])?;
    for s in &r.solvers {
        w.write_record([
            s.solver.clone(),
            s.official_rank.to_string(),
            s.official_score.to_string(),
            s.median_score.to_string(),
            s.ci_lower.to_string(),
            s.ci_upper.to_string(),
            s.win_count.to_string(),
            s.win_fraction.to_string(),
            s.group.to_string(),
            s.fractional_rank.to_string(),
            s.rank_q25.to_string(),
            s.rank_q75.to_string(),
        ])?;
    }
    finish(w, &path)?;

    let path = dir.join("groups.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["group", "fractional_rank", "size", "members"])?;
    for g in &r.groups {
        w.write_record([
            g.index.to_string(),
            g.fractional_rank.to_string(),
            g.members.len().to_string(),
            g.members.join(";"),
        ])?;
    }
    finish(w, &path)?;

    let path = dir.join("diagnostics.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["scope", "solvers", "groups", "tied_pairs", "inversions", "mean_rank_iqr", "mean_score_iqr"])?;
    let d = &r.diagnostics;
    for (label, s) in [("all", &d.all), ("top10", &d.top10), ("top3", &d.top3)] {
        w.write_record([
            label.to_string(),
            s.solvers.len().to_string(),
            s.groups.to_string(),
            s.tied_pairs.to_string(),
            s.inversions.to_string(),
            s.mean_rank_iqr.to_string(),
            s.mean_score_iqr.to_string(),
        ])?;
    }
    finish(w, &path)?;

    if let Some(sens) = &r.sensitivity {
        emit_sensitivity_csv(sens, &dir.join("sensitivity.csv"))?;
    }
    Ok(())
}

pub const PLOT_HEADER: [&str; 6] = ["solver", "official_rank", "official_score", "median_score", "ci_lower", "ci_upper"];

/// Confidence-interval plot data for the `top` best officially ranked solvers.
pub fn emit_plot_data(r: &AnalysisReport, path: &Path, top: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(PLOT_HEADER)?;
    for s in r.solvers.iter().take(top) {
        w.write_record([
            s.solver.clone(),
            s.official_rank.to_string(),
            s.official_score.to_string(),
            s.median_score.to_string(),
            s.ci_lower.to_string(),
            s.ci_upper.to_string(),
        ])?;
    }
    finish(w, path)
}

pub const SENSITIVITY_HEADER: [&str; 6] = ["instance", "any_change", "top10_comp", "top10_order", "top3_comp", "top3_order"];

/// Per-instance flags as 0/1.
pub fn write_sensitivity_csv<W: Write>(s: &SensitivitySection, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SENSITIVITY_HEADER)?;
    let bit = |b: bool| if b { "1" } else { "0" };
    for f in &s.instances {
        w.write_record([
            f.instance.as_str(),
            bit(f.any_change),
            bit(f.top10_comp),
            bit(f.top10_order),
            bit(f.top3_comp),
            bit(f.top3_order),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<sensitivity csv>", e))
}

pub fn emit_sensitivity_csv(s: &SensitivitySection, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    write_sensitivity_csv(s, &mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Score matrix dump: `replicate,<solver ids...>`.
pub fn write_matrix_csv(m: &ScoreMatrix, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["replicate".to_string()];
    header.extend(m.solvers().iter().cloned());
    w.write_record(&header)?;
    for i in 0..m.replicates() {
        let mut rec = vec![i.to_string()];
        rec.extend(m.row(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    finish(w, path)
}
