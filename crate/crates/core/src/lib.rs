//! Pseudo-Boolean black-box optimisation with fast hypermutations.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`], [`rng`], [`eval`] hold the genotype, the deterministic random
//!   source and the evaluation ledger shared by everything else.
//! * [`distributions`] precomputes the step/size tables used by the operators.
//! * [`operators`] implements every mutation and hypermutation operator behind
//!   one [`operators::Operator`] type.
//! * [`algorithms`] runs the elitist (1+1) loop and Opt-IA with hybrid ageing.
//! * [`problems`] contains the benchmark functions, Partition and Vertex Cover.
//! * [`harness`] turns many runs into CSV records, summaries and scaling fits.

#![cfg_attr(test, allow(clippy::needless_range_loop))]

pub mod algorithms;
pub mod bits;
pub mod distributions;
pub mod error;
pub mod eval;
pub mod harness;
pub mod operators;
pub mod problems;
pub mod rng;

pub use algorithms::{AgeingConfig, Engine, Init, RunConfig, RunRecord};
pub use bits::{hamming, BitString};
pub use error::{Error, Result};
pub use eval::{EvalContext, EvaluationLedger, Halt, Individual};
pub use operators::{MutationOutcome, Operator, OperatorConfig, OperatorKind};
pub use problems::{Direction, Problem};
pub use rng::RandomSource;
