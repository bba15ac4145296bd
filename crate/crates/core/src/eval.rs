use crate::bits::BitString;
use crate::problems::{Direction, Problem};

/// Genotype with its cached objective value and age in generations.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: BitString,
    pub fitness: f64,
    pub age: u64,
}

impl Individual {
    pub fn new(genotype: BitString, fitness: f64) -> Self {
        Individual {
            genotype,
            fitness,
            age: 0,
        }
    }
}

/// Counts objective calls against an optional budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationLedger {
    count: u64,
    budget: Option<u64>,
}

impl EvaluationLedger {
    pub fn new(budget: Option<u64>) -> Self {
        EvaluationLedger { count: 0, budget }
    }

    pub fn unlimited() -> Self {
        EvaluationLedger::new(None)
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.budget, Some(b) if self.count >= b)
    }

    /// Reserve one evaluation. Fails once `count` has reached the budget.
    pub fn charge(&mut self) -> Result<u64, Halt> {
        if self.is_exhausted() {
            return Err(Halt::BudgetExhausted);
        }
        self.count += 1;
        Ok(self.count)
    }
}

/// Why a run (or a single operator call) stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Halt {
    BudgetExhausted,
    /// The point just evaluated satisfies the target predicate.
    TargetReached { fitness: f64 },
}

/// Best evaluated point seen so far, in the problem's direction.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BestTracker {
    pub best_fitness: Option<f64>,
    /// 1-based ledger index of the evaluation that first reached `best_fitness`.
    pub first_hit_evaluation: u64,
}

impl BestTracker {
    pub fn observe(&mut self, fitness: f64, evaluation: u64, direction: Direction) {
        let improved = match self.best_fitness {
            None => true,
            Some(b) => direction.better(fitness, b),
        };
        if improved {
            self.best_fitness = Some(fitness);
            self.first_hit_evaluation = evaluation;
        }
    }
}

/// Everything an operator needs to evaluate points: the problem, the ledger
/// and the run-level bookkeeping (best point, target hit).
pub struct EvalContext<'p> {
    problem: &'p dyn Problem,
    ledger: EvaluationLedger,
    best: BestTracker,
    target_hit: Option<u64>,
    stop_on_target: bool,
}

impl<'p> EvalContext<'p> {
    pub fn new(problem: &'p dyn Problem, budget: Option<u64>) -> Self {
        EvalContext {
            problem,
            ledger: EvaluationLedger::new(budget),
            best: BestTracker::default(),
            target_hit: None,
            stop_on_target: true,
        }
    }

    /// A context that records target hits but keeps going.
    pub fn without_target_stop(problem: &'p dyn Problem, budget: Option<u64>) -> Self {
        EvalContext {
            stop_on_target: false,
            ..EvalContext::new(problem, budget)
        }
    }

    pub fn problem(&self) -> &'p dyn Problem {
        self.problem
    }

    pub fn direction(&self) -> Direction {
        self.problem.direction()
    }

    pub fn ledger(&self) -> &EvaluationLedger {
        &self.ledger
    }

    pub fn evaluations(&self) -> u64 {
        self.ledger.count()
    }

    pub fn best(&self) -> BestTracker {
        self.best
    }

    pub fn target_hit(&self) -> Option<u64> {
        self.target_hit
    }

    /// Evaluate `x`, charging the ledger and updating run statistics.
    pub fn evaluate(&mut self, x: &BitString) -> Result<f64, Halt> {
        let idx = self.ledger.charge()?;
        let f = self.problem.evaluate(x);
        self.best.observe(f, idx, self.problem.direction());
        if self.target_hit.is_none() && self.problem.is_target(x, f) {
            self.target_hit = Some(idx);
            if self.stop_on_target {
                return Err(Halt::TargetReached { fitness: f });
            }
        }
        Ok(f)
    }
}
