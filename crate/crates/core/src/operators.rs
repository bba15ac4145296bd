//! Mutation and hypermutation operators.
//!
//! Every operator takes a parent [`Individual`], charges its evaluations to
//! an [`EvalContext`] and returns a [`MutationOutcome`]. When the context
//! halts mid-call (budget or target), the operator surfaces an
//! [`Interrupt`] carrying whatever it had evaluated so far.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bits::BitString;
use crate::distributions::{
    DiscreteTable, ParabolicEvalDist, PowerLawRateDist, SizeDistribution, StepSchedule,
    SymmetricPowerLawDist, UniformHeavyTailDist,
};
use crate::error::{Error, Result};
use crate::eval::{EvalContext, Halt, Individual};
use crate::rng::RandomSource;

/// Result of one operator application.
#[derive(Clone, Debug, PartialEq)]
pub struct MutationOutcome {
    pub offspring: Individual,
    pub evals_used: u64,
    /// Offspring strictly better than the parent.
    pub improved: bool,
    /// False only when the parent is returned without any evaluation.
    pub evaluated: bool,
}

/// An operator call cut short by the evaluation context.
#[derive(Clone, Debug, PartialEq)]
pub struct Interrupt {
    pub halt: Halt,
    /// Last point returned by the operator's own rule, if any was evaluated.
    pub partial: Option<MutationOutcome>,
}

pub type OpResult = std::result::Result<MutationOutcome, Interrupt>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    FcmGamma,
    FcmBeta,
    HmpBeta,
    StaticHmpFcm,
    StaticHmpPlain,
    Sbm,
    RlsFlip,
    EaBeta,
    EaUnif,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 9] = [
        OperatorKind::FcmGamma,
        OperatorKind::FcmBeta,
        OperatorKind::HmpBeta,
        OperatorKind::StaticHmpFcm,
        OperatorKind::StaticHmpPlain,
        OperatorKind::Sbm,
        OperatorKind::RlsFlip,
        OperatorKind::EaBeta,
        OperatorKind::EaUnif,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::FcmGamma => "fcm-gamma",
            OperatorKind::FcmBeta => "fcm-beta",
            OperatorKind::HmpBeta => "hmp-beta",
            OperatorKind::StaticHmpFcm => "static-hmp-fcm",
            OperatorKind::StaticHmpPlain => "static-hmp-plain",
            OperatorKind::Sbm => "sbm",
            OperatorKind::RlsFlip => "rls-flip",
            OperatorKind::EaBeta => "ea-beta",
            OperatorKind::EaUnif => "ea-unif",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown operator {s:?}")))
    }
}

/// How the heavy-tailed EA turns a sampled `chi` into flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EaMode {
    /// Flip each bit independently with probability `chi / n`.
    #[default]
    Rate,
    /// Flip exactly `chi` distinct bits.
    ExactK,
}

impl FromStr for EaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate" => Ok(EaMode::Rate),
            "exact-k" | "exact" => Ok(EaMode::ExactK),
            other => Err(Error::Config(format!("unknown EA mode {other:?} (rate, exact-k)"))),
        }
    }
}

impl fmt::Display for EaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EaMode::Rate => "rate",
            EaMode::ExactK => "exact-k",
        })
    }
}

/// Operator choice plus parameters. Unset parameters take their defaults
/// at [`Operator::new`]: `gamma = 1/ln n`, `beta = 1.5`, `p1 = 1/e`,
/// `rate = 1/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorConfig {
    pub kind: OperatorKind,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub p1: Option<f64>,
    pub rate: Option<f64>,
    pub extended: bool,
    pub mode: EaMode,
}

impl OperatorConfig {
    pub fn new(kind: OperatorKind) -> Self {
        OperatorConfig {
            kind,
            gamma: None,
            beta: None,
            p1: None,
            rate: None,
            extended: false,
            mode: EaMode::Rate,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_p1(mut self, p1: f64) -> Self {
        self.p1 = Some(p1);
        self
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = Some(rate);
        self
    }

    pub fn extended(mut self, extended: bool) -> Self {
        self.extended = extended;
        self
    }

    pub fn with_mode(mut self, mode: EaMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Debug)]
enum Prepared {
    Sequential(StepSchedule),
    Complement,
    Sbm(f64),
    Rls,
    Sized(DiscreteTable),
    RateFromTable(DiscreteTable),
}

/// An operator with its tables built for a fixed dimension.
#[derive(Clone, Debug)]
pub struct Operator {
    config: OperatorConfig,
    n: usize,
    prepared: Prepared,
}

/// Per-run scratch space; keeps the position permutation between calls.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    perm: Vec<usize>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            perm: (0..n).collect(),
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.perm.len() != n {
            self.perm = (0..n).collect();
        }
    }

    /// Draw the `s`-th position of a uniformly random order, given that
    /// positions `perm[..s]` were drawn before.
    #[inline]
    fn draw(&mut self, s: usize, rng: &mut RandomSource) -> usize {
        let j = rng.gen_range(s..self.perm.len());
        self.perm.swap(s, j);
        self.perm[s]
    }

    /// Fill slot `t` with a uniform pick from `perm[lo..=t]`.
    #[inline]
    fn draw_back(&mut self, lo: usize, t: usize, rng: &mut RandomSource) {
        let j = rng.gen_range(lo..=t);
        self.perm.swap(t, j);
    }
}

impl Operator {
    pub fn new(config: OperatorConfig, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        let beta = |default: f64| config.beta.unwrap_or(default);
        let prepared = match config.kind {
            OperatorKind::FcmGamma => {
                let gamma = config
                    .gamma
                    .unwrap_or_else(|| ParabolicEvalDist::default_gamma(n));
                if n == 1 {
                    // single step, evaluated with probability 1/e
                    if !(gamma > 0.0 && gamma <= 1.0) {
                        return Err(Error::Config(format!("gamma must lie in (0,1], got {gamma}")));
                    }
                    Prepared::Sequential(StepSchedule::new(&[0.0, 1.0 / std::f64::consts::E])?)
                } else {
                    let d = ParabolicEvalDist::new(n, gamma)?;
                    Prepared::Sequential(StepSchedule::new(d.step_probabilities())?)
                }
            }
            OperatorKind::FcmBeta => {
                let d = SymmetricPowerLawDist::new(n, beta(SymmetricPowerLawDist::DEFAULT_BETA))?;
                Prepared::Sequential(StepSchedule::new(&d.step_probabilities())?)
            }
            OperatorKind::HmpBeta => {
                let d = SymmetricPowerLawDist::new(n, beta(SymmetricPowerLawDist::DEFAULT_BETA))?;
                Prepared::Sized(d.table().clone())
            }
            OperatorKind::StaticHmpFcm => Prepared::Sequential(StepSchedule::every_step(n)),
            OperatorKind::StaticHmpPlain => Prepared::Complement,
            OperatorKind::Sbm => {
                let rate = config.rate.unwrap_or(1.0 / n as f64);
                if !(0.0..=1.0).contains(&rate) {
                    return Err(Error::Config(format!("mutation rate must lie in [0,1], got {rate}")));
                }
                Prepared::Sbm(rate)
            }
            OperatorKind::RlsFlip => Prepared::Rls,
            OperatorKind::EaBeta => {
                let d = PowerLawRateDist::new(
                    n,
                    beta(PowerLawRateDist::DEFAULT_BETA),
                    config.extended,
                )?;
                match config.mode {
                    EaMode::Rate => Prepared::RateFromTable(d.table().clone()),
                    EaMode::ExactK => Prepared::Sized(d.table().clone()),
                }
            }
            OperatorKind::EaUnif => {
                let d = UniformHeavyTailDist::new(
                    n,
                    config.p1.unwrap_or(UniformHeavyTailDist::DEFAULT_P1),
                )?;
                Prepared::Sized(d.table().clone())
            }
        };
        Ok(Operator {
            config,
            n,
            prepared,
        })
    }

    pub fn config(&self) -> &OperatorConfig {
        &self.config
    }

    pub fn kind(&self) -> OperatorKind {
        self.config.kind
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Every call costs exactly one evaluation.
    pub fn single_evaluation(&self) -> bool {
        !matches!(self.prepared, Prepared::Sequential(_))
    }

    /// Apply once with fresh scratch space.
    pub fn apply_once(
        &self,
        parent: &Individual,
        ctx: &mut EvalContext<'_>,
        rng: &mut RandomSource,
    ) -> OpResult {
        self.apply(parent, ctx, rng, &mut Scratch::new(self.n))
    }

    pub fn apply(
        &self,
        parent: &Individual,
        ctx: &mut EvalContext<'_>,
        rng: &mut RandomSource,
        scratch: &mut Scratch,
    ) -> OpResult {
        debug_assert_eq!(parent.genotype.len(), self.n);
        scratch.ensure(self.n);
        match &self.prepared {
            Prepared::Sequential(schedule) => sequential(parent, schedule, ctx, rng, scratch),
            Prepared::Complement => {
                let mut x = parent.genotype.clone();
                x.complement_in_place();
                evaluate_once(parent, x, ctx)
            }
            Prepared::Sbm(rate) => sbm(parent, *rate, ctx, rng),
            Prepared::Rls => flip_exactly(parent, 1, ctx, rng, scratch),
            Prepared::Sized(table) => {
                let k = table.sample_size(rng);
                flip_exactly(parent, k, ctx, rng, scratch)
            }
            Prepared::RateFromTable(table) => {
                let chi = table.sample_size(rng);
                sbm(parent, chi as f64 / self.n as f64, ctx, rng)
            }
        }
    }
}

fn outcome(parent: &Individual, x: BitString, f: f64, evals: u64, ctx: &EvalContext<'_>) -> MutationOutcome {
    MutationOutcome {
        improved: ctx.direction().better(f, parent.fitness),
        offspring: Individual {
            genotype: x,
            fitness: f,
            age: parent.age,
        },
        evals_used: evals,
        evaluated: true,
    }
}

fn unevaluated(parent: &Individual) -> MutationOutcome {
    MutationOutcome {
        offspring: parent.clone(),
        evals_used: 0,
        improved: false,
        evaluated: false,
    }
}

/// Evaluate a single candidate.
fn evaluate_once(parent: &Individual, x: BitString, ctx: &mut EvalContext<'_>) -> OpResult {
    match ctx.evaluate(&x) {
        Ok(f) => Ok(outcome(parent, x, f, 1, ctx)),
        Err(halt @ Halt::TargetReached { fitness }) => Err(Interrupt {
            halt,
            partial: Some(outcome(parent, x, fitness, 1, ctx)),
        }),
        Err(halt) => Err(Interrupt {
            halt,
            partial: None,
        }),
    }
}

/// Sequential hypermutation: flip distinct positions in random order,
/// evaluating the steps chosen by `schedule`, and stop at the first point
/// strictly better than the parent. Without improvement the last evaluated
/// point is returned; with no evaluation at all, the parent.
pub fn sequential(
    parent: &Individual,
    schedule: &StepSchedule,
    ctx: &mut EvalContext<'_>,
    rng: &mut RandomSource,
    scratch: &mut Scratch,
) -> OpResult {
    let n = parent.genotype.len();
    scratch.ensure(n);
    let direction = ctx.direction();
    let mut x = parent.genotype.clone();
    let mut applied = 0usize;
    let mut evals = 0u64;
    let mut last: Option<(usize, f64)> = None;

    // perm[tail..] was drawn from the back and is flipped in order
    let mut tail = n;
    while let Some(next) = schedule.next_evaluated(applied, rng) {
        if tail == n && n - next < next - applied {
            // cheaper to pick the positions that stay unflipped
            for t in (next..n).rev() {
                scratch.draw_back(applied, t, rng);
            }
            x = parent.genotype.clone();
            x.complement_in_place();
            for &pos in &scratch.perm[next..n] {
                x.toggle(pos);
            }
            applied = next;
            tail = next;
        }
        while applied < next {
            let pos = if applied >= tail {
                scratch.perm[applied]
            } else {
                scratch.draw(applied, rng)
            };
            x.toggle(pos);
            applied += 1;
        }
        match ctx.evaluate(&x) {
            Ok(f) => {
                evals += 1;
                if direction.better(f, parent.fitness) {
                    return Ok(outcome(parent, x, f, evals, ctx));
                }
                last = Some((applied, f));
            }
            Err(halt @ Halt::TargetReached { fitness }) => {
                return Err(Interrupt {
                    halt,
                    partial: Some(outcome(parent, x, fitness, evals + 1, ctx)),
                });
            }
            Err(halt) => {
                let partial = last.map(|(step, f)| {
                    for i in step..applied {
                        x.toggle(scratch.perm[i]);
                    }
                    outcome(parent, x, f, evals, ctx)
                });
                return Err(Interrupt { halt, partial });
            }
        }
    }
    match last {
        Some((_, f)) => Ok(outcome(parent, x, f, evals, ctx)),
        None => Ok(unevaluated(parent)),
    }
}

/// Flip exactly `k` distinct uniformly random positions, then evaluate once.
pub fn flip_exactly(
    parent: &Individual,
    k: usize,
    ctx: &mut EvalContext<'_>,
    rng: &mut RandomSource,
    scratch: &mut Scratch,
) -> OpResult {
    let n = parent.genotype.len();
    assert!(k <= n, "cannot flip {k} of {n} bits");
    scratch.ensure(n);
    let mut x = parent.genotype.clone();
    if k == n {
        x.complement_in_place();
    } else {
        for s in 0..k {
            let pos = scratch.draw(s, rng);
            x.toggle(pos);
        }
    }
    evaluate_once(parent, x, ctx)
}

/// Standard bit mutation: every position flips independently with
/// probability `rate`; always one evaluation.
pub fn sbm(
    parent: &Individual,
    rate: f64,
    ctx: &mut EvalContext<'_>,
    rng: &mut RandomSource,
) -> OpResult {
    let n = parent.genotype.len();
    let mut x = parent.genotype.clone();
    if rate >= 1.0 {
        x.complement_in_place();
    } else if rate > 0.25 {
        for i in 0..n {
            if rng.gen_bool(rate) {
                x.toggle(i);
            }
        }
    } else if rate > 0.0 {
        // jump straight to the next flipped position
        let denom = (-rate).ln_1p();
        let mut i = 0usize;
        loop {
            let skip = (rng.open01().ln() / denom).floor();
            if skip >= (n - i) as f64 {
                break;
            }
            i += skip as usize;
            x.toggle(i);
            i += 1;
            if i >= n {
                break;
            }
        }
    }
    evaluate_once(parent, x, ctx)
}
