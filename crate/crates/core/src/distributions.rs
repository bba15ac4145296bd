//! Step-evaluation and mutation-size distributions.
//!
//! All tables are built once per `(n, parameter)` pair and are immutable
//! afterwards. Size distributions sample by binary search over a cumulative
//! table.

use std::f64::consts::E;

use rand::Rng;

use crate::error::{Error, Result};

/// Probability table over the contiguous support `start..start + len`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteTable {
    start: usize,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl DiscreteTable {
    /// Normalise non-negative `weights` into a table starting at `start`.
    pub fn from_weights(start: usize, weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Config("weights sum to zero".into()));
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        // Guard the search against rounding in the last partial sum.
        let last_positive = probs.iter().rposition(|p| *p > 0.0).unwrap();
        for c in cdf.iter_mut().skip(last_positive) {
            *c = 1.0;
        }
        Ok(DiscreteTable { start, probs, cdf })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Largest value in the support.
    pub fn end(&self) -> usize {
        self.start + self.probs.len() - 1
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// `Pr{K = k}`; zero outside the support.
    pub fn probability(&self, k: usize) -> f64 {
        k.checked_sub(self.start)
            .and_then(|i| self.probs.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|c| *c <= u);
        self.start + idx.min(self.probs.len() - 1)
    }
}

/// Distributions over a number of bits to flip.
pub trait SizeDistribution {
    fn table(&self) -> &DiscreteTable;

    fn sample_size<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table().sample(rng)
    }

    fn probability(&self, k: usize) -> f64 {
        self.table().probability(k)
    }
}

impl SizeDistribution for DiscreteTable {
    fn table(&self) -> &DiscreteTable {
        self
    }
}

/// Per-step evaluation probabilities of the parabolic fast hypermutation.
///
/// `p(1) = p(n) = 1/e` and `p(i) = gamma / min(i, n - i)` in between, which
/// reproduces both branches `gamma/i` (i <= n/2) and `gamma/(n-i)` for even
/// `n` and stays symmetric for odd `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParabolicEvalDist {
    n: usize,
    gamma: f64,
    // index 0 unused so that p[i] is the probability after the i-th flip
    p: Vec<f64>,
}

impl ParabolicEvalDist {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("parabolic distribution needs n >= 2, got {n}")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Config(format!(
                "gamma must lie in (0,1], got {gamma}"
            )));
        }
        let mut p = vec![0.0; n + 1];
        for (i, slot) in p.iter_mut().enumerate().skip(1) {
            *slot = if i == 1 || i == n {
                1.0 / E
            } else {
                gamma / i.min(n - i) as f64
            };
        }
        Ok(ParabolicEvalDist { n, gamma, p })
    }

    /// `gamma = 1 / ln n`, capped at 1 for tiny `n`.
    pub fn default_gamma(n: usize) -> f64 {
        (1.0 / (n as f64).ln()).min(1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Probability of evaluating after the `i`-th flip, `1 <= i <= n`.
    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    /// Per-step probabilities indexed `1..=n` (slot 0 is zero).
    pub fn step_probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Expected evaluations of one hypermutation that never improves.
    pub fn expected_evaluations(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Symmetric power law over sizes `0..=n`:
/// `p(i) ∝ min(i + 1, n - i + 1)^(-beta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPowerLawDist {
    n: usize,
    beta: f64,
    table: DiscreteTable,
}

impl SymmetricPowerLawDist {
    pub const DEFAULT_BETA: f64 = 1.5;

    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Config("symmetric power law needs n >= 1".into()));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta must be >= 1, got {beta}")));
        }
        let weights: Vec<f64> = (0..=n)
            .map(|i| ((i + 1).min(n - i + 1) as f64).powf(-beta))
            .collect();
        Ok(SymmetricPowerLawDist {
            n,
            beta,
            table: DiscreteTable::from_weights(0, &weights)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self, i: usize) -> f64 {
        self.table.probability(i)
    }

    /// The same masses read as per-step evaluation probabilities `1..=n`
    /// (slot 0 is zero), as used by the sequential FCM variant.
    pub fn step_probabilities(&self) -> Vec<f64> {
        let mut v = self.table.probabilities().to_vec();
        v[0] = 0.0;
        v
    }
}

impl SizeDistribution for SymmetricPowerLawDist {
    fn table(&self) -> &DiscreteTable {
        &self.table
    }
}

/// Power-law rate `chi` over `1..=upper`, `p(chi) ∝ chi^(-beta)`.
/// `upper` is `n/2` for the original operator and `n` when extended.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerLawRateDist {
    n: usize,
    beta: f64,
    upper: usize,
    table: DiscreteTable,
}

impl PowerLawRateDist {
    pub const DEFAULT_BETA: f64 = 1.5;

    pub fn new(n: usize, beta: f64, extended: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("power-law rate needs n >= 2".into()));
        }
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta must be > 1, got {beta}")));
        }
        let upper = if extended { n } else { n / 2 };
        let weights: Vec<f64> = (1..=upper).map(|c| (c as f64).powf(-beta)).collect();
        Ok(PowerLawRateDist {
            n,
            beta,
            upper,
            table: DiscreteTable::from_weights(1, &weights)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn p(&self, chi: usize) -> f64 {
        self.table.probability(chi)
    }
}

impl SizeDistribution for PowerLawRateDist {
    fn table(&self) -> &DiscreteTable {
        &self.table
    }
}

/// Uniform heavy tail over sizes `1..=n`: `p(1) = p1`, the rest share `1 - p1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformHeavyTailDist {
    n: usize,
    p1: f64,
    table: DiscreteTable,
}

impl UniformHeavyTailDist {
    pub const DEFAULT_P1: f64 = 1.0 / E;

    pub fn new(n: usize, p1: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("uniform heavy tail needs n >= 2".into()));
        }
        if !(p1 > 0.0 && p1 < 1.0) {
            return Err(Error::Config(format!("p1 must lie in (0,1), got {p1}")));
        }
        let mut weights = vec![(1.0 - p1) / (n - 1) as f64; n];
        weights[0] = p1;
        Ok(UniformHeavyTailDist {
            n,
            p1,
            table: DiscreteTable::from_weights(1, &weights)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p(&self, k: usize) -> f64 {
        self.table.probability(k)
    }
}

impl SizeDistribution for UniformHeavyTailDist {
    fn table(&self) -> &DiscreteTable {
        &self.table
    }
}

/// Which steps of a sequential hypermutation get evaluated.
///
/// Each step `i` is evaluated independently with probability `p[i]`. Rather
/// than tossing one coin per step, [`StepSchedule::next_evaluated`] samples
/// the index of the next successful coin directly from the survival
/// function, which has the same joint law.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSchedule {
    n: usize,
    // log_survival[i] = sum over j <= i with p_j < 1 of ln(1 - p_j)
    log_survival: Vec<f64>,
    // next_certain[k] = smallest j > k with p_j == 1, or n + 1
    next_certain: Vec<usize>,
}

impl StepSchedule {
    /// `probs[i]` for `i in 1..=n`; `probs[0]` is ignored.
    pub fn new(probs: &[f64]) -> Result<Self> {
        let n = probs.len().saturating_sub(1);
        if probs[1..].iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
            return Err(Error::Config("step probabilities must lie in [0,1]".into()));
        }
        let mut log_survival = vec![0.0; n + 1];
        for i in 1..=n {
            let p = probs[i];
            log_survival[i] = log_survival[i - 1] + if p < 1.0 { (-p).ln_1p() } else { 0.0 };
        }
        let mut next_certain = vec![n + 1; n + 1];
        let mut next = n + 1;
        for k in (0..=n).rev() {
            next_certain[k] = next;
            if k >= 1 && probs[k] >= 1.0 {
                next = k;
            }
        }
        Ok(StepSchedule {
            n,
            log_survival,
            next_certain,
        })
    }

    pub fn every_step(n: usize) -> Self {
        let mut probs = vec![1.0; n + 1];
        probs[0] = 0.0;
        StepSchedule::new(&probs).expect("valid probabilities")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Next evaluated step strictly after step `k`, or `None` if no further
    /// step among `k+1..=n` is evaluated.
    pub fn next_evaluated(&self, k: usize, rng: &mut crate::rng::RandomSource) -> Option<usize> {
        if k >= self.n {
            return None;
        }
        let certain = self.next_certain[k];
        if certain == k + 1 {
            return Some(certain);
        }
        let hi = certain.min(self.n + 1);
        let threshold = self.log_survival[k] + rng.open01().ln();
        let segment = &self.log_survival[k + 1..hi];
        let offset = segment.partition_point(|v| *v >= threshold);
        if offset < segment.len() {
            Some(k + 1 + offset)
        } else if certain <= self.n {
            Some(certain)
        } else {
            None
        }
    }
}
