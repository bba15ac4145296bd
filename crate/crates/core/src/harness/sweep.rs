use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::Value;

use super::spec::{Algorithm, ExperimentSpec, ResolvedRun};
use crate::algorithms::{run_with, RunRecord};
use crate::error::{Error, Result};
use crate::operators::Operator;

/// One finished replication.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub replication: usize,
    pub operator: String,
    pub problem: String,
    pub params: BTreeMap<String, Value>,
    pub record: RunRecord,
}

impl SweepRecord {
    /// Evaluations until the target, or the total spent when it was missed.
    pub fn runtime(&self) -> u64 {
        self.record.evaluations_to_target.unwrap_or(self.record.evaluations)
    }
}

struct Cell {
    run: ResolvedRun,
    operator: Operator,
}

/// Run every algorithm at every dimension `spec.reps` times.
///
/// Replication `r` uses stream `r` of `spec.seed`, so results do not depend
/// on `jobs`. Records come back ordered by algorithm, dimension, replication.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    let dims = spec.dimensions()?;
    let mut cells = Vec::new();
    for &algorithm in &spec.algorithms {
        for &n in &dims {
            let run = spec.resolve(algorithm, n)?;
            let operator = Operator::new(run.config.operator.clone(), n)?;
            cells.push(Cell { run, operator });
        }
    }
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.reps).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, r)| {
                let cell = &cells[c];
                let record = run_with(&*cell.run.problem, &cell.run.config, &cell.operator, r as u64)?;
                log::debug!(
                    "{} n={} rep={} evals={} success={}",
                    cell.run.algorithm,
                    cell.run.n,
                    r,
                    record.evaluations,
                    record.success
                );
                Ok(SweepRecord {
                    algorithm: cell.run.algorithm,
                    n: cell.run.n,
                    replication: r,
                    operator: cell.operator.kind().to_string(),
                    problem: cell.run.problem.descriptor(),
                    params: cell.run.params.clone(),
                    record,
                })
            })
            .collect()
    })
}
