//! Parameter sweeps, aggregation and scaling fits.

pub mod expr;
pub mod output;
pub mod spec;
pub mod stats;
pub mod sweep;

pub use expr::{Expr, Vars};
pub use output::{read_runs, rows, summary_path, write_runs, write_summary, RunRow};
pub use spec::{Algorithm, ExperimentSpec, Param, ProblemName, ResolvedRun};
pub use stats::{aggregate, clopper_pearson, fit_scaling, fit_scaling_with, FitResult, Observation, Summary};
pub use sweep::{run_sweep, SweepRecord};
