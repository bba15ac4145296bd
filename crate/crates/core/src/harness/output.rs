use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::expr::Vars;
use super::stats::{FitResult, Observation, Summary};
use super::sweep::SweepRecord;
use crate::error::{Error, Result};

pub const RUNS_HEADER: [&str; 12] = [
    "run_id",
    "seed",
    "algorithm",
    "operator",
    "problem",
    "n",
    "params_json",
    "evaluations",
    "generations",
    "success",
    "best_fitness",
    "first_hit_evaluation",
];

pub const SUMMARY_HEADER: [&str; 7] = ["n", "mean", "median", "stderr", "success_rate", "ratio", "model"];

/// One line of a per-run CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: usize,
    pub seed: u64,
    pub algorithm: String,
    pub operator: String,
    pub problem: String,
    pub n: usize,
    pub params_json: String,
    pub evaluations: u64,
    pub generations: u64,
    pub success: bool,
    pub best_fitness: Option<f64>,
    pub first_hit_evaluation: u64,
}

impl RunRow {
    /// Numeric entries of `params_json`, for binding model variables.
    pub fn param_vars(&self) -> Vars {
        let mut vars = Vars::new();
        if let Ok(serde_json::Value::Object(map)) = serde_json::from_str(&self.params_json) {
            for (k, v) in map {
                if let Some(x) = v.as_f64() {
                    vars.insert(k, x);
                }
            }
        }
        vars
    }

    pub fn observation(&self) -> Observation {
        Observation {
            n: self.n,
            success: self.success,
            evaluations: self.evaluations,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn rows(records: &[SweepRecord]) -> Vec<RunRow> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| RunRow {
            run_id: i,
            seed: r.record.seed,
            algorithm: r.algorithm.to_string(),
            operator: r.operator.clone(),
            problem: r.problem.clone(),
            n: r.n,
            // BTreeMap keys serialise sorted
            params_json: serde_json::to_string(&r.params).expect("json values"),
            evaluations: r.runtime(),
            generations: r.record.generations,
            success: r.record.success,
            best_fitness: r.record.best_fitness,
            first_hit_evaluation: r.record.best_first_hit_evaluation,
        })
        .collect()
}

pub fn write_runs<W: std::io::Write>(writer: W, rows: &[RunRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(RUNS_HEADER).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != RUNS_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", RUNS_HEADER.join(",")),
        });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Summary table; `ratio` and `model` stay empty without a fit.
pub fn write_summary<W: std::io::Write>(writer: W, summaries: &[Summary], fit: Option<&FitResult>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let e = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(SUMMARY_HEADER).map_err(e)?;
    for s in summaries {
        let point = fit.and_then(|f| f.points.iter().find(|p| p.n == s.n));
        w.write_record([
            s.n.to_string(),
            opt(s.mean),
            opt(s.median),
            opt(s.stderr),
            s.success_rate.to_string(),
            opt(point.map(|p| p.ratio)),
            point.map(|p| p.model.to_string()).unwrap_or_default(),
        ])
        .map_err(e)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// `{stem}_summary.csv`, or `{stem}_{algorithm}_summary.csv` when a sweep
/// covers several algorithms.
pub fn summary_path(runs_path: &Path, algorithm: Option<&str>) -> PathBuf {
    let stem = runs_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "runs".into());
    let name = match algorithm {
        Some(a) => format!("{stem}_{a}_summary.csv"),
        None => format!("{stem}_summary.csv"),
    };
    runs_path.with_file_name(name)
}
