//! Objective functions and instance utilities.

mod benchmarks;
mod graph;
mod partition;
mod vertex_cover;

pub use benchmarks::{Cliff, Flat, HiddenPath, Jump, LeadingOnes, OneMax, Trap};
pub use graph::{Graph, GraphKind};
pub use partition::{make_w_eps, partition_target, Partition, PartitionInstance};
pub use vertex_cover::{vc_two_approx_target, VertexCoverEdge, VertexCoverNode};

use crate::bits::BitString;

/// Optimisation direction of a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Maximise,
    Minimise,
}

impl Direction {
    /// `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximise => a > b,
            Direction::Minimise => a < b,
        }
    }

    /// `a` is at least as good as `b`.
    #[inline]
    pub fn not_worse(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximise => a >= b,
            Direction::Minimise => a <= b,
        }
    }

    /// Map a raw objective value to a score where larger is better.
    #[inline]
    pub fn score(self, f: f64) -> f64 {
        match self {
            Direction::Maximise => f,
            Direction::Minimise => -f,
        }
    }
}

/// Pseudo-Boolean objective.
///
/// `evaluate` must be pure. `is_target` receives the fitness that
/// `evaluate` just returned for `x`, so cheap predicates can use it.
pub trait Problem: Send + Sync {
    fn dimension(&self) -> usize;

    fn direction(&self) -> Direction {
        Direction::Maximise
    }

    fn evaluate(&self, x: &BitString) -> f64;

    fn is_target(&self, x: &BitString, fitness: f64) -> bool;

    /// Stable identifier, e.g. `jump(n=20,d=3)`.
    fn descriptor(&self) -> String;
}

impl<P: Problem + ?Sized> Problem for Box<P> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn direction(&self) -> Direction {
        (**self).direction()
    }
    fn evaluate(&self, x: &BitString) -> f64 {
        (**self).evaluate(x)
    }
    fn is_target(&self, x: &BitString, fitness: f64) -> bool {
        (**self).is_target(x, fitness)
    }
    fn descriptor(&self) -> String {
        (**self).descriptor()
    }
}

/// Absolute tolerance for target comparisons on real-valued objectives.
pub const TARGET_TOLERANCE: f64 = 1e-9;
