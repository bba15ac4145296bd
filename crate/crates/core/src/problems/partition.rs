use crate::bits::BitString;
use crate::error::{Error, Result};

use super::{Direction, Problem, TARGET_TOLERANCE};

/// Two-machine scheduling instance with processing times sorted
/// non-increasingly.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionInstance {
    weights: Vec<f64>,
    total: f64,
    known_opt: Option<f64>,
}

impl PartitionInstance {
    /// Sorts `weights` descending if needed (with a warning).
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("partition instance has no jobs".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Config(format!("job weights must be positive, got {w}")));
        }
        if weights.windows(2).any(|w| w[0] < w[1]) {
            log::warn!("partition weights not in descending order; sorting");
            weights.sort_by(|a, b| b.total_cmp(a));
        }
        let total = weights.iter().sum();
        Ok(PartitionInstance {
            weights,
            total,
            known_opt: None,
        })
    }

    /// Record the exact optimal makespan, if known.
    pub fn with_known_optimum(mut self, opt: f64) -> Self {
        self.known_opt = Some(opt);
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_opt
    }

    /// `max(p_1, W/2)`.
    pub fn opt_lower_bound(&self) -> f64 {
        self.weights[0].max(self.total / 2.0)
    }

    /// Exact optimum when known, otherwise the lower bound.
    pub fn reference_optimum(&self) -> f64 {
        self.known_opt.unwrap_or_else(|| self.opt_lower_bound())
    }

    /// Loads of machine 1 (bits set) and machine 0.
    pub fn loads(&self, x: &BitString) -> (f64, f64) {
        let mut one = 0.0;
        let mut zero = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            if x.get(i) {
                one += w;
            } else {
                zero += w;
            }
        }
        (one, zero)
    }

    pub fn makespan(&self, x: &BitString) -> f64 {
        let (a, b) = self.loads(x);
        a.max(b)
    }

    /// One weight per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut weights = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let w: f64 = line.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("not a number: {line:?}"),
            })?;
            weights.push(w);
        }
        PartitionInstance::new(weights)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for w in &self.weights {
            s.push_str(&format!("{w}\n"));
        }
        s
    }
}

/// The worst-case instance: two jobs of `1/3 - eps/4` and `n - 2` jobs
/// sharing `1/3 + eps/2`. Total weight is 1 and the optimum is 1/2.
pub fn make_w_eps(n: usize, eps: f64) -> Result<PartitionInstance> {
    if n < 4 {
        return Err(Error::Config(format!("W_eps needs n >= 4, got {n}")));
    }
    if !(eps > 0.0 && eps < 1.0 / 3.0) {
        return Err(Error::Config(format!("W_eps needs 0 < eps < 1/3, got {eps}")));
    }
    let large = 1.0 / 3.0 - eps / 4.0;
    let small = (1.0 / 3.0 + eps / 2.0) / (n - 2) as f64;
    let mut weights = vec![small; n];
    weights[0] = large;
    weights[1] = large;
    Ok(PartitionInstance::new(weights)?.with_known_optimum(0.5))
}

/// `fitness <= (1 + eps_approx) * OPT`, with OPT the known optimum or the
/// lower bound `max(p_1, W/2)`.
pub fn partition_target(fitness: f64, instance: &PartitionInstance, eps_approx: f64) -> bool {
    fitness <= (1.0 + eps_approx) * instance.reference_optimum() + TARGET_TOLERANCE
}

/// Makespan minimisation over a [`PartitionInstance`]; bit `i` set puts job
/// `i` on machine 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    instance: PartitionInstance,
    eps_approx: f64,
}

impl Partition {
    pub fn new(instance: PartitionInstance, eps_approx: f64) -> Result<Self> {
        if !(eps_approx >= 0.0 && eps_approx.is_finite()) {
            return Err(Error::Config(format!("eps_approx must be >= 0, got {eps_approx}")));
        }
        Ok(Partition {
            instance,
            eps_approx,
        })
    }

    pub fn instance(&self) -> &PartitionInstance {
        &self.instance
    }

    pub fn eps_approx(&self) -> f64 {
        self.eps_approx
    }
}

impl Problem for Partition {
    fn dimension(&self) -> usize {
        self.instance.len()
    }

    fn direction(&self) -> Direction {
        Direction::Minimise
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        self.instance.makespan(x)
    }

    fn is_target(&self, _: &BitString, fitness: f64) -> bool {
        partition_target(fitness, &self.instance, self.eps_approx)
    }

    fn descriptor(&self) -> String {
        format!(
            "partition(n={},eps_approx={})",
            self.instance.len(),
            self.eps_approx
        )
    }
}
