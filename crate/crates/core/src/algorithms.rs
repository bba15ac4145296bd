//! The elitist (1+1) engine and the generational Opt-IA engine.
//!
//! Both are stepwise: construct, call `step`/`generation` until it returns
//! a [`Halt`], then `finish` into a [`RunRecord`]. [`run`] drives either to
//! completion.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::eval::{EvalContext, Halt, Individual};
use crate::operators::{MutationOutcome, Operator, OperatorConfig, Scratch};
use crate::problems::{Direction, Problem};
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    OnePlusOne,
    OptIa,
}

/// Population and ageing parameters of Opt-IA.
#[derive(Clone, Debug, PartialEq)]
pub struct AgeingConfig {
    /// Age threshold; `None` disables ageing.
    pub tau: Option<u64>,
    pub mu: usize,
    pub dup: usize,
    /// Removal probability; `None` means `1 - 1/((dup+1) mu)`.
    pub p_die: Option<f64>,
}

impl AgeingConfig {
    pub fn new(mu: usize, dup: usize, tau: Option<u64>) -> Self {
        AgeingConfig {
            tau,
            mu,
            dup,
            p_die: None,
        }
    }

    pub fn with_p_die(mut self, p_die: f64) -> Self {
        self.p_die = Some(p_die);
        self
    }

    pub fn default_p_die(mu: usize, dup: usize) -> f64 {
        1.0 - 1.0 / ((dup + 1) * mu) as f64
    }

    pub fn p_die(&self) -> f64 {
        self.p_die
            .unwrap_or_else(|| AgeingConfig::default_p_die(self.mu, self.dup))
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu == 0 || self.dup == 0 {
            return Err(Error::Config("mu and dup must be at least 1".into()));
        }
        if self.tau == Some(0) {
            return Err(Error::Config("tau must be positive".into()));
        }
        let p = self.p_die();
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("p_die must lie in [0,1], got {p}")));
        }
        Ok(())
    }
}

/// How the initial point(s) are chosen.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Init {
    #[default]
    Uniform,
    Given(BitString),
    /// Uniform among strings with exactly this many ones.
    RandomWithOnes(usize),
}

impl Init {
    fn sample(&self, n: usize, rng: &mut RandomSource) -> Result<BitString> {
        match self {
            Init::Uniform => Ok(BitString::random(n, rng)),
            Init::Given(x) if x.len() == n => Ok(x.clone()),
            Init::Given(x) => Err(Error::Config(format!(
                "initial point has length {}, problem has {n}",
                x.len()
            ))),
            Init::RandomWithOnes(k) => BitString::random_with_ones(n, *k, rng)
                .map_err(|e| Error::Config(e.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub operator: OperatorConfig,
    pub engine: Engine,
    pub ageing: Option<AgeingConfig>,
    pub budget: Option<u64>,
    pub init: Init,
    pub seed: u64,
}

impl RunConfig {
    pub fn one_plus_one(operator: OperatorConfig, budget: Option<u64>, seed: u64) -> Self {
        RunConfig {
            operator,
            engine: Engine::OnePlusOne,
            ageing: None,
            budget,
            init: Init::Uniform,
            seed,
        }
    }

    pub fn opt_ia(
        operator: OperatorConfig,
        ageing: AgeingConfig,
        budget: Option<u64>,
        seed: u64,
    ) -> Self {
        RunConfig {
            operator,
            engine: Engine::OptIa,
            ageing: Some(ageing),
            budget,
            init: Init::Uniform,
            seed,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub stream: u64,
    pub evaluations: u64,
    pub evaluations_to_target: Option<u64>,
    pub generations: u64,
    pub success: bool,
    pub best_fitness: Option<f64>,
    pub best_first_hit_evaluation: u64,
}

fn record(ctx: &EvalContext<'_>, rng: &RandomSource, generations: u64) -> RunRecord {
    let best = ctx.best();
    RunRecord {
        seed: rng.seed(),
        stream: rng.stream(),
        evaluations: ctx.evaluations(),
        evaluations_to_target: ctx.target_hit(),
        generations,
        success: ctx.target_hit().is_some(),
        best_fitness: best.best_fitness,
        best_first_hit_evaluation: best.first_hit_evaluation,
    }
}

fn check_dimension(problem: &dyn Problem, operator: &Operator) -> Result<()> {
    if problem.dimension() != operator.dimension() {
        return Err(Error::Config(format!(
            "operator built for n={}, problem has n={}",
            operator.dimension(),
            problem.dimension()
        )));
    }
    Ok(())
}

/// Elitist loop: replace the current point by any evaluated offspring that
/// is not worse.
pub struct OnePlusOne<'a> {
    operator: &'a Operator,
    ctx: EvalContext<'a>,
    rng: RandomSource,
    scratch: Scratch,
    current: Option<Individual>,
    generations: u64,
    halted: Option<Halt>,
}

impl<'a> OnePlusOne<'a> {
    pub fn new(
        problem: &'a dyn Problem,
        operator: &'a Operator,
        budget: Option<u64>,
        init: &Init,
        mut rng: RandomSource,
    ) -> Result<Self> {
        check_dimension(problem, operator)?;
        let n = problem.dimension();
        let mut ctx = EvalContext::new(problem, budget);
        let x = init.sample(n, &mut rng)?;
        let (current, halted) = match ctx.evaluate(&x) {
            Ok(f) => (Some(Individual::new(x, f)), None),
            Err(h @ Halt::TargetReached { fitness }) => (Some(Individual::new(x, fitness)), Some(h)),
            Err(h) => (None, Some(h)),
        };
        Ok(OnePlusOne {
            operator,
            ctx,
            rng,
            scratch: Scratch::new(n),
            current,
            generations: 0,
            halted,
        })
    }

    pub fn current(&self) -> Option<&Individual> {
        self.current.as_ref()
    }

    pub fn context(&self) -> &EvalContext<'a> {
        &self.ctx
    }

    pub fn halted(&self) -> Option<Halt> {
        self.halted
    }

    /// One operator call and selection.
    pub fn step(&mut self) -> std::result::Result<MutationOutcome, Halt> {
        if let Some(h) = self.halted {
            return Err(h);
        }
        let current = self.current.as_ref().expect("initialised");
        self.generations += 1;
        match self
            .operator
            .apply(current, &mut self.ctx, &mut self.rng, &mut self.scratch)
        {
            Ok(out) => {
                if out.evaluated
                    && self
                        .ctx
                        .direction()
                        .not_worse(out.offspring.fitness, current.fitness)
                {
                    self.current = Some(out.offspring.clone());
                }
                Ok(out)
            }
            Err(interrupt) => {
                if let (Halt::TargetReached { .. }, Some(p)) = (interrupt.halt, interrupt.partial) {
                    self.current = Some(p.offspring);
                }
                self.halted = Some(interrupt.halt);
                Err(interrupt.halt)
            }
        }
    }

    pub fn run_to_end(&mut self) {
        while self.step().is_ok() {}
    }

    pub fn finish(&self) -> RunRecord {
        record(&self.ctx, &self.rng, self.generations)
    }
}

/// What happened in one Opt-IA generation.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GenerationStats {
    /// `(parent age after increment, mutant age, improved)` per clone.
    pub mutants: Vec<(u64, u64, bool)>,
    pub removed: usize,
    pub filled: usize,
    pub truncated: usize,
}

/// Remove every member with age `>= tau` independently with probability
/// `p_die`. Younger members always survive.
pub fn apply_hybrid_ageing<R: Rng + ?Sized>(
    population: Vec<Individual>,
    tau: Option<u64>,
    p_die: f64,
    rng: &mut R,
) -> Vec<Individual> {
    let Some(tau) = tau else {
        return population;
    };
    population
        .into_iter()
        .filter(|ind| !(ind.age >= tau && rng.gen_bool(p_die)))
        .collect()
}

/// Keep the `mu` best members, breaking ties uniformly at random.
pub fn truncate_to_best<R: Rng + ?Sized>(
    population: &mut Vec<Individual>,
    mu: usize,
    direction: Direction,
    rng: &mut R,
) {
    if population.len() <= mu {
        return;
    }
    population.shuffle(rng);
    population.sort_by(|a, b| {
        direction
            .score(b.fitness)
            .partial_cmp(&direction.score(a.fitness))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    population.truncate(mu);
}

/// Generational immune algorithm with cloning, hypermutation and hybrid
/// ageing.
pub struct OptIa<'a> {
    operator: &'a Operator,
    ageing: AgeingConfig,
    ctx: EvalContext<'a>,
    rng: RandomSource,
    scratch: Scratch,
    population: Vec<Individual>,
    generations: u64,
    halted: Option<Halt>,
    init: Init,
}

impl<'a> OptIa<'a> {
    pub fn new(
        problem: &'a dyn Problem,
        operator: &'a Operator,
        ageing: AgeingConfig,
        budget: Option<u64>,
        init: &Init,
        rng: RandomSource,
    ) -> Result<Self> {
        check_dimension(problem, operator)?;
        ageing.validate()?;
        let n = problem.dimension();
        let mut ia = OptIa {
            operator,
            ctx: EvalContext::new(problem, budget),
            rng,
            scratch: Scratch::new(n),
            population: Vec::with_capacity(ageing.mu * (ageing.dup + 1)),
            generations: 0,
            halted: None,
            init: init.clone(),
            ageing,
        };
        for _ in 0..ia.ageing.mu {
            if let Err(h) = ia.add_fresh(true) {
                ia.halted = Some(h);
                break;
            }
        }
        Ok(ia)
    }

    /// Evaluate and append a new individual of age 0.
    fn add_fresh(&mut self, initial: bool) -> std::result::Result<(), Halt> {
        let n = self.operator.dimension();
        let x = if initial {
            self.init.sample(n, &mut self.rng).expect("validated init")
        } else {
            BitString::random(n, &mut self.rng)
        };
        match self.ctx.evaluate(&x) {
            Ok(f) => {
                self.population.push(Individual::new(x, f));
                Ok(())
            }
            Err(h @ Halt::TargetReached { fitness }) => {
                self.population.push(Individual::new(x, fitness));
                Err(h)
            }
            Err(h) => Err(h),
        }
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn context(&self) -> &EvalContext<'a> {
        &self.ctx
    }

    pub fn generations(&self) -> u64 {
        self.generations
    }

    pub fn halted(&self) -> Option<Halt> {
        self.halted
    }

    pub fn generation(&mut self) -> std::result::Result<GenerationStats, Halt> {
        if let Some(h) = self.halted {
            return Err(h);
        }
        self.generations += 1;
        let mut stats = GenerationStats::default();
        let direction = self.ctx.direction();

        for ind in &mut self.population {
            ind.age += 1;
        }

        let mut mutants = Vec::with_capacity(self.population.len() * self.ageing.dup);
        for parent in &self.population {
            for _ in 0..self.ageing.dup {
                match self
                    .operator
                    .apply(parent, &mut self.ctx, &mut self.rng, &mut self.scratch)
                {
                    Ok(out) => {
                        let mut child = out.offspring;
                        child.age = if out.improved { 0 } else { parent.age };
                        stats.mutants.push((parent.age, child.age, out.improved));
                        mutants.push(child);
                    }
                    Err(interrupt) => {
                        self.halted = Some(interrupt.halt);
                        return Err(interrupt.halt);
                    }
                }
            }
        }

        let mut merged = std::mem::take(&mut self.population);
        merged.extend(mutants);
        let before = merged.len();
        let mut survivors =
            apply_hybrid_ageing(merged, self.ageing.tau, self.ageing.p_die(), &mut self.rng);
        stats.removed = before - survivors.len();
        self.population = std::mem::take(&mut survivors);

        while self.population.len() < self.ageing.mu {
            stats.filled += 1;
            if let Err(h) = self.add_fresh(false) {
                self.halted = Some(h);
                return Err(h);
            }
        }

        stats.truncated = self.population.len().saturating_sub(self.ageing.mu);
        truncate_to_best(&mut self.population, self.ageing.mu, direction, &mut self.rng);
        Ok(stats)
    }

    pub fn run_to_end(&mut self) {
        while self.generation().is_ok() {}
    }

    pub fn finish(&self) -> RunRecord {
        record(&self.ctx, &self.rng, self.generations)
    }
}

/// Run `config` on `problem` with a prebuilt operator and the given
/// replication stream.
pub fn run_with(
    problem: &dyn Problem,
    config: &RunConfig,
    operator: &Operator,
    stream: u64,
) -> Result<RunRecord> {
    let rng = RandomSource::new(config.seed, stream);
    match config.engine {
        Engine::OnePlusOne => {
            let mut e = OnePlusOne::new(problem, operator, config.budget, &config.init, rng)?;
            e.run_to_end();
            Ok(e.finish())
        }
        Engine::OptIa => {
            let ageing = config
                .ageing
                .clone()
                .ok_or_else(|| Error::Config("Opt-IA needs an ageing configuration".into()))?;
            let mut e = OptIa::new(problem, operator, ageing, config.budget, &config.init, rng)?;
            e.run_to_end();
            Ok(e.finish())
        }
    }
}

/// Build the operator for `problem` and run once.
pub fn run(problem: &dyn Problem, config: &RunConfig, stream: u64) -> Result<RunRecord> {
    let operator = Operator::new(config.operator.clone(), problem.dimension())?;
    run_with(problem, config, &operator, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorKind;
    use crate::problems::{LeadingOnes, OneMax, Trap};
    use std::sync::atomic::{AtomicU64, Ordering};

    fn cfg(kind: OperatorKind) -> OperatorConfig {
        OperatorConfig::new(kind)
    }

    struct Counting<P> {
        inner: P,
        calls: AtomicU64,
    }

    impl<P: Problem> Problem for Counting<P> {
        fn dimension(&self) -> usize {
            self.inner.dimension()
        }
        fn direction(&self) -> Direction {
            self.inner.direction()
        }
        fn evaluate(&self, x: &BitString) -> f64 {
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.inner.evaluate(x)
        }
        fn is_target(&self, x: &BitString, f: f64) -> bool {
            self.inner.is_target(x, f)
        }
        fn descriptor(&self) -> String {
            self.inner.descriptor()
        }
    }

    #[test]
    fn onemax_n1_is_quick() {
        let p = OneMax::new(1);
        let mut total = 0;
        for r in 0..2000 {
            let rec = run(&p, &RunConfig::one_plus_one(cfg(OperatorKind::FcmGamma), None, 1), r).unwrap();
            assert!(rec.success);
            total += rec.evaluations;
        }
        let mean = total as f64 / 2000.0;
        // 1 + (1/2) * e plus sampling noise
        assert!(mean <= 1.0 + std::f64::consts::E, "{mean}");
    }

    #[test]
    fn ledger_matches_counting_wrapper() {
        for kind in OperatorKind::ALL {
            let p = Counting {
                inner: LeadingOnes::new(20),
                calls: AtomicU64::new(0),
            };
            let rec = run(&p, &RunConfig::one_plus_one(cfg(kind), Some(20_000), 3), 0).unwrap();
            assert_eq!(rec.evaluations, p.calls.load(Ordering::Relaxed), "{kind}");

            let p = Counting {
                inner: LeadingOnes::new(20),
                calls: AtomicU64::new(0),
            };
            let ageing = AgeingConfig::new(3, 2, Some(50));
            let rec = run(&p, &RunConfig::opt_ia(cfg(kind), ageing, Some(20_000), 3), 0).unwrap();
            assert_eq!(rec.evaluations, p.calls.load(Ordering::Relaxed), "{kind}");
        }
    }

    #[test]
    fn elitist_never_gets_worse() {
        let p = LeadingOnes::new(30);
        let op = Operator::new(cfg(OperatorKind::FcmGamma), 30).unwrap();
        let mut e = OnePlusOne::new(&p, &op, Some(50_000), &Init::Uniform, RandomSource::new(4, 0)).unwrap();
        let mut prev = e.current().unwrap().fitness;
        while e.step().is_ok() {
            let f = e.current().unwrap().fitness;
            assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn replay_is_identical() {
        let p = OneMax::new(40);
        let c = RunConfig::opt_ia(cfg(OperatorKind::FcmGamma), AgeingConfig::new(2, 2, Some(200)), Some(1_000_000), 11);
        assert_eq!(run(&p, &c, 5).unwrap(), run(&p, &c, 5).unwrap());
        assert_ne!(run(&p, &c, 5).unwrap(), run(&p, &c, 6).unwrap());
    }

    #[test]
    fn ageing_examples() {
        let mut rng = RandomSource::new(5, 0);
        let ind = |age| Individual {
            genotype: BitString::zeros(3),
            fitness: 0.0,
            age,
        };
        let young: Vec<_> = (0..5).map(&ind).collect();
        assert_eq!(apply_hybrid_ageing(young.clone(), Some(5), 1.0, &mut rng), young);
        let old: Vec<_> = (0..5).map(|_| ind(7)).collect();
        assert!(apply_hybrid_ageing(old.clone(), Some(5), 1.0, &mut rng).is_empty());
        assert_eq!(apply_hybrid_ageing(old, None, 1.0, &mut rng).len(), 5);

        // six members at age tau with the default p_die of mu=3, dup=1
        let p_die = AgeingConfig::default_p_die(3, 1);
        assert!((p_die - 5.0 / 6.0).abs() < 1e-15);
        let trials = 1_000_000;
        let at_tau: Vec<_> = (0..6).map(|_| ind(4)).collect();
        let exactly_one = (0..trials)
            .filter(|_| apply_hybrid_ageing(at_tau.clone(), Some(4), p_die, &mut rng).len() == 1)
            .count();
        let p = 6.0 * (1.0 / 6.0) * (5.0f64 / 6.0).powi(5);
        assert!((p - 0.4019).abs() < 1e-4);
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((exactly_one as f64 - trials as f64 * p).abs() < 3.0 * sd);
    }

    #[test]
    fn truncation_keeps_best_with_random_ties() {
        let mut rng = RandomSource::new(6, 0);
        let mk = |f: f64, tag: usize| Individual {
            genotype: BitString::zeros(4),
            fitness: f,
            age: tag as u64,
        };
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            let mut pop = vec![mk(1.0, 0), mk(5.0, 0), mk(3.0, 1), mk(3.0, 2), mk(3.0, 3)];
            truncate_to_best(&mut pop, 2, Direction::Maximise, &mut rng);
            assert_eq!(pop[0].fitness, 5.0);
            assert_eq!(pop[1].fitness, 3.0);
            counts[pop[1].age as usize - 1] += 1;
        }
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 400.0);
        }
        let mut pop = vec![mk(1.0, 0), mk(5.0, 0)];
        truncate_to_best(&mut pop, 1, Direction::Minimise, &mut rng);
        assert_eq!(pop[0].fitness, 1.0);
    }

    #[test]
    fn generation_step_order_invariants() {
        let p = LeadingOnes::new(24);
        let op = Operator::new(cfg(OperatorKind::FcmGamma), 24).unwrap();
        let ageing = AgeingConfig::new(4, 2, Some(30));
        let mut ia = OptIa::new(&p, &op, ageing.clone(), Some(2_000_000), &Init::Uniform, RandomSource::new(7, 0)).unwrap();
        assert_eq!(ia.population().len(), 4);
        let mut fills = 4u64;
        let mut calls = 0u64;
        while let Ok(stats) = ia.generation() {
            assert_eq!(ia.population().len(), 4);
            assert_eq!(stats.mutants.len(), 8);
            calls += 8;
            for (parent_age, child_age, improved) in &stats.mutants {
                assert!(*parent_age >= 1);
                if *improved {
                    assert_eq!(*child_age, 0);
                } else {
                    assert_eq!(child_age, parent_age);
                }
            }
            assert!(stats.filled == 0 || stats.truncated == 0);
            fills += stats.filled as u64;
        }
        // every member is evaluated on creation; FCM calls use at most n each
        assert!(ia.context().evaluations() >= fills);
        assert!(ia.context().evaluations() <= fills + calls * 24 + 24);
    }

    #[test]
    fn single_evaluation_operators_satisfy_count_identity() {
        for kind in [OperatorKind::HmpBeta, OperatorKind::Sbm, OperatorKind::RlsFlip] {
            let p = OneMax::new(30);
            let op = Operator::new(cfg(kind), 30).unwrap();
            let ageing = AgeingConfig::new(3, 2, Some(5));
            let mut ia = OptIa::new(&p, &op, ageing, None, &Init::Uniform, RandomSource::new(8, 0)).unwrap();
            let mut fills = 0u64;
            for _ in 0..300 {
                match ia.generation() {
                    Ok(s) => fills += s.filled as u64,
                    Err(_) => break,
                }
            }
            let g = ia.generations();
            let evals = ia.context().evaluations();
            if ia.halted().is_none() {
                assert_eq!(g * 6 + fills + 3, evals, "{kind}");
            }
        }
    }

    #[test]
    fn infinite_tau_never_removes() {
        let p = Trap::new(12);
        let op = Operator::new(cfg(OperatorKind::Sbm), 12).unwrap();
        let mut ia = OptIa::new(&p, &op, AgeingConfig::new(2, 1, None), None, &Init::Given(BitString::ones(12)), RandomSource::new(9, 0)).unwrap();
        for _ in 0..10_000 {
            match ia.generation() {
                Ok(s) => {
                    assert_eq!(s.removed, 0);
                    assert_eq!(s.filled, 0);
                }
                Err(_) => break,
            }
        }
    }

    #[test]
    fn tau_one_pdie_one_restarts() {
        let p = OneMax::new(20);
        let op = Operator::new(cfg(OperatorKind::StaticHmpPlain), 20).unwrap();
        let ageing = AgeingConfig::new(3, 1, Some(1)).with_p_die(1.0);
        let mut ia = OptIa::new(&p, &op, ageing, None, &Init::Uniform, RandomSource::new(10, 0)).unwrap();
        for _ in 0..200 {
            let Ok(stats) = ia.generation() else { break };
            let improvements = stats.mutants.iter().filter(|m| m.2).count();
            // parents (age >= 1) and non-improving clones all die
            assert_eq!(stats.removed, 6 - improvements);
            assert!(ia.population().iter().all(|i| i.age == 0));
        }
    }

    #[test]
    fn budget_zero_records_failure() {
        let p = OneMax::new(5);
        let rec = run(&p, &RunConfig::one_plus_one(cfg(OperatorKind::RlsFlip), Some(0), 1), 0).unwrap();
        assert!(!rec.success);
        assert_eq!(rec.evaluations, 0);
        assert_eq!(rec.best_fitness, None);
    }

    #[test]
    fn ageing_keeps_best_ever_seen() {
        let p = OneMax::new(16);
        let c = RunConfig::opt_ia(cfg(OperatorKind::Sbm), AgeingConfig::new(1, 1, Some(1)).with_p_die(1.0), Some(3000), 2);
        let rec = run(&p, &c, 0).unwrap();
        assert!(rec.best_first_hit_evaluation <= rec.evaluations);
        assert!(rec.best_fitness.unwrap() >= 8.0);
    }
}
