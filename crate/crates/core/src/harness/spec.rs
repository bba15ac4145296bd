//! Experiment descriptions as flat `section.key = value` maps.
//!
//! Numeric values may be literals (`1e6`), expressions in `n` and `d`
//! (`n/4`, `2*n*ln(n)`), `auto` where a default formula exists, or `inf`
//! for an unbounded budget or age threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{json, Value};

use super::expr::{Expr, Vars};
use crate::algorithms::{AgeingConfig, Engine, Init, RunConfig};
use crate::distributions::ParabolicEvalDist;
use crate::error::{Error, Result};
use crate::operators::{EaMode, OperatorConfig, OperatorKind};
use crate::problems::{
    make_w_eps, Cliff, Graph, GraphKind, HiddenPath, Jump, LeadingOnes, OneMax, Partition,
    PartitionInstance, Problem, Trap, VertexCoverEdge, VertexCoverNode,
};

/// Every key an experiment map may contain.
pub const KNOWN_KEYS: &[&str] = &[
    "engine.budget",
    "engine.mu",
    "engine.dup",
    "engine.tau",
    "engine.pdie",
    "engine.seed",
    "operator.algo",
    "operator.gamma",
    "operator.beta",
    "operator.p1",
    "operator.rate",
    "operator.extended",
    "operator.mode",
    "problem.name",
    "problem.d",
    "problem.eps",
    "problem.eps_approx",
    "problem.graph",
    "problem.vertices",
    "problem.graph_file",
    "problem.instance_file",
    "problem.init_ones",
    "sweep.dims",
    "sweep.reps",
    "sweep.jobs",
    "sweep.out",
    "sweep.model",
];

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Named algorithms: an engine plus an operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Rls,
    OnePlusOneEa,
    OnePlusOneIa,
    OnePlusOneIaPlain,
    FastIaGamma,
    FastIaBetaFcm,
    FastIaBetaHmp,
    FastEaBeta,
    FastEaUnif,
    OptIaGamma,
    OptIaBeta,
}

impl Algorithm {
    pub const ALL: [Algorithm; 11] = [
        Algorithm::Rls,
        Algorithm::OnePlusOneEa,
        Algorithm::OnePlusOneIa,
        Algorithm::OnePlusOneIaPlain,
        Algorithm::FastIaGamma,
        Algorithm::FastIaBetaFcm,
        Algorithm::FastIaBetaHmp,
        Algorithm::FastEaBeta,
        Algorithm::FastEaUnif,
        Algorithm::OptIaGamma,
        Algorithm::OptIaBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rls => "rls",
            Algorithm::OnePlusOneEa => "one-plus-one-ea",
            Algorithm::OnePlusOneIa => "one-plus-one-ia",
            Algorithm::OnePlusOneIaPlain => "one-plus-one-ia-plain",
            Algorithm::FastIaGamma => "fast-ia-gamma",
            Algorithm::FastIaBetaFcm => "fast-ia-beta-fcm",
            Algorithm::FastIaBetaHmp => "fast-ia-beta-hmp",
            Algorithm::FastEaBeta => "fast-ea-beta",
            Algorithm::FastEaUnif => "fast-ea-unif",
            Algorithm::OptIaGamma => "opt-ia-gamma",
            Algorithm::OptIaBeta => "opt-ia-beta",
        }
    }

    pub fn operator_kind(self) -> OperatorKind {
        match self {
            Algorithm::Rls => OperatorKind::RlsFlip,
            Algorithm::OnePlusOneEa => OperatorKind::Sbm,
            Algorithm::OnePlusOneIa => OperatorKind::StaticHmpFcm,
            Algorithm::OnePlusOneIaPlain => OperatorKind::StaticHmpPlain,
            Algorithm::FastIaGamma | Algorithm::OptIaGamma => OperatorKind::FcmGamma,
            Algorithm::FastIaBetaFcm | Algorithm::OptIaBeta => OperatorKind::FcmBeta,
            Algorithm::FastIaBetaHmp => OperatorKind::HmpBeta,
            Algorithm::FastEaBeta => OperatorKind::EaBeta,
            Algorithm::FastEaUnif => OperatorKind::EaUnif,
        }
    }

    pub fn is_population_based(self) -> bool {
        matches!(self, Algorithm::OptIaGamma | Algorithm::OptIaBeta)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                Error::Config(format!("unknown algorithm {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// A numeric setting that may depend on the dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Auto,
    Infinite,
    Expr(Expr),
}

impl Param {
    pub fn parse(key: &str, raw: &str) -> Result<Param> {
        match raw.trim() {
            "auto" => Ok(Param::Auto),
            "inf" | "infinity" | "none" => Ok(Param::Infinite),
            s => Expr::parse(s)
                .map(Param::Expr)
                .map_err(|e| Error::Config(format!("{key}: {e}"))),
        }
    }

    fn value(&self, key: &str, vars: &Vars) -> Result<Option<f64>> {
        match self {
            Param::Expr(e) => {
                let v = e.eval(vars).map_err(|e| Error::Config(format!("{key}: {e}")))?;
                if !v.is_finite() {
                    return Err(Error::Config(format!("{key} evaluates to {v}")));
                }
                Ok(Some(v))
            }
            _ => Ok(None),
        }
    }
}

fn expr_only(key: &str, p: &Param, vars: &Vars) -> Result<f64> {
    match p {
        Param::Expr(_) => Ok(p.value(key, vars)?.expect("expression")),
        _ => Err(Error::Config(format!("{key} needs a numeric value"))),
    }
}

fn to_count(key: &str, v: f64) -> Result<u64> {
    if v < 0.0 || v.fract().abs() > 1e-9 * v.abs().max(1.0) {
        return Err(Error::Config(format!("{key} must be a non-negative integer, got {v}")));
    }
    Ok(v.round() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemName {
    OneMax,
    LeadingOnes,
    Trap,
    Jump,
    Cliff,
    HiddenPath,
    PartitionWeps,
    Partition,
    VcNode,
    VcEdge,
}

impl ProblemName {
    const NAMES: [(&'static str, ProblemName); 10] = [
        ("onemax", ProblemName::OneMax),
        ("leadingones", ProblemName::LeadingOnes),
        ("trap", ProblemName::Trap),
        ("jump", ProblemName::Jump),
        ("cliff", ProblemName::Cliff),
        ("hiddenpath", ProblemName::HiddenPath),
        ("partition-weps", ProblemName::PartitionWeps),
        ("partition", ProblemName::Partition),
        ("vc-node", ProblemName::VcNode),
        ("vc-edge", ProblemName::VcEdge),
    ];

    pub fn name(self) -> &'static str {
        ProblemName::NAMES.iter().find(|(_, p)| *p == self).unwrap().0
    }
}

impl FromStr for ProblemName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemName::NAMES
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, p)| *p)
            .ok_or_else(|| {
                let names: Vec<&str> = ProblemName::NAMES.iter().map(|(n, _)| *n).collect();
                Error::Config(format!("unknown problem {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// A fully parsed experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub algorithms: Vec<Algorithm>,
    pub problem: ProblemName,
    pub d: Option<Param>,
    pub eps: Option<Param>,
    pub eps_approx: Option<Param>,
    pub graph: GraphKind,
    pub vertices: Option<Param>,
    pub graph_file: Option<PathBuf>,
    pub instance_file: Option<PathBuf>,
    pub init_ones: Option<Param>,
    pub gamma: Option<Param>,
    pub beta: Option<Param>,
    pub p1: Option<Param>,
    pub rate: Option<Param>,
    pub extended: bool,
    pub mode: EaMode,
    pub budget: Option<Param>,
    pub mu: Option<Param>,
    pub dup: Option<Param>,
    pub tau: Option<Param>,
    pub pdie: Option<Param>,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub reps: usize,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub model: Option<String>,
}

/// One algorithm at one dimension, ready to run.
pub struct ResolvedRun {
    pub algorithm: Algorithm,
    pub n: usize,
    pub problem: Box<dyn Problem>,
    pub config: RunConfig,
    /// Canonical parameter record for output.
    pub params: BTreeMap<String, Value>,
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected true or false, got {other:?}"))),
    }
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    let v = Expr::parse(s.trim())
        .and_then(|e| e.eval(&Vars::new()))
        .map_err(|e| Error::Config(format!("{key}: {e}")))?;
    Ok(to_count(key, v)? as usize)
}

impl ExperimentSpec {
    /// Build from `section.key` strings; unknown keys are rejected.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        for k in map.keys() {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!(
                    "unknown key {k:?}; known keys: {}",
                    KNOWN_KEYS.join(", ")
                )));
            }
        }
        let get = |k: &str| map.get(k).map(|s| s.trim()).filter(|s| !s.is_empty());
        let param = |k: &str| get(k).map(|s| Param::parse(k, s)).transpose();

        let algorithms = get("operator.algo")
            .ok_or_else(|| Error::Config("operator.algo is required".into()))?
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Algorithm>>>()?;
        let problem: ProblemName = get("problem.name")
            .ok_or_else(|| Error::Config("problem.name is required".into()))?
            .parse()?;
        let dims = match get("sweep.dims") {
            None => Vec::new(),
            Some(s) => s
                .split(',')
                .map(|d| parse_usize("sweep.dims", d))
                .collect::<Result<Vec<_>>>()?,
        };
        let spec = ExperimentSpec {
            algorithms,
            problem,
            d: param("problem.d")?,
            eps: param("problem.eps")?,
            eps_approx: param("problem.eps_approx")?,
            graph: get("problem.graph").map(str::parse).transpose()?.unwrap_or(GraphKind::Star),
            vertices: param("problem.vertices")?,
            graph_file: get("problem.graph_file").map(PathBuf::from),
            instance_file: get("problem.instance_file").map(PathBuf::from),
            init_ones: param("problem.init_ones")?,
            gamma: param("operator.gamma")?,
            beta: param("operator.beta")?,
            p1: param("operator.p1")?,
            rate: param("operator.rate")?,
            extended: get("operator.extended")
                .map(|s| parse_bool("operator.extended", s))
                .transpose()?
                .unwrap_or(false),
            mode: get("operator.mode").map(str::parse).transpose()?.unwrap_or_default(),
            budget: param("engine.budget")?,
            mu: param("engine.mu")?,
            dup: param("engine.dup")?,
            tau: param("engine.tau")?,
            pdie: param("engine.pdie")?,
            seed: get("engine.seed")
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Error::Config(format!("engine.seed: not an unsigned integer: {s:?}")))
                })
                .transpose()?
                .unwrap_or(0),
            dims,
            reps: get("sweep.reps").map(|s| parse_usize("sweep.reps", s)).transpose()?.unwrap_or(1),
            jobs: get("sweep.jobs").map(|s| parse_usize("sweep.jobs", s)).transpose()?.unwrap_or(1),
            out: get("sweep.out").map(PathBuf::from),
            model: get("sweep.model").map(str::to_string),
        };
        if spec.reps == 0 {
            return Err(Error::Config("sweep.reps must be at least 1".into()));
        }
        if spec.jobs == 0 {
            return Err(Error::Config("sweep.jobs must be at least 1".into()));
        }
        if let Some(m) = &spec.model {
            Expr::parse(m)?;
        }
        Ok(spec)
    }

    /// Dimension fixed by an instance file, if the problem reads one.
    pub fn fixed_dimension(&self) -> Result<Option<usize>> {
        match self.problem {
            ProblemName::Partition => Ok(Some(self.load_instance()?.len())),
            ProblemName::VcNode | ProblemName::VcEdge if self.graph_file.is_some() => {
                let g = self.load_graph_file()?;
                Ok(Some(if self.problem == ProblemName::VcNode {
                    g.vertex_count()
                } else {
                    g.edge_count()
                }))
            }
            _ => Ok(None),
        }
    }

    /// The dimensions to sweep: `sweep.dims`, or the file-fixed dimension.
    pub fn dimensions(&self) -> Result<Vec<usize>> {
        let fixed = self.fixed_dimension()?;
        match (fixed, self.dims.is_empty()) {
            (Some(n), true) => Ok(vec![n]),
            (Some(n), false) => {
                if self.dims.iter().any(|&d| d != n) {
                    return Err(Error::Config(format!(
                        "the instance file fixes n={n}, but sweep.dims lists {:?}",
                        self.dims
                    )));
                }
                Ok(vec![n])
            }
            (None, true) => Err(Error::Config("empty dimension list (sweep.dims)".into())),
            (None, false) => {
                let mut dims = self.dims.clone();
                dims.sort_unstable();
                dims.dedup();
                if dims.contains(&0) {
                    return Err(Error::Config("dimensions must be positive".into()));
                }
                Ok(dims)
            }
        }
    }

    fn load_instance(&self) -> Result<PartitionInstance> {
        let path = self
            .instance_file
            .as_ref()
            .ok_or_else(|| Error::Config("problem partition needs problem.instance_file".into()))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        PartitionInstance::parse(&text)
    }

    fn load_graph_file(&self) -> Result<Graph> {
        let path = self.graph_file.as_ref().expect("checked by caller");
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Graph::parse_dimacs(&text)
    }

    /// Graph for a vertex-cover problem whose bit-string has length `n`.
    fn build_graph(&self, n: usize, vars: &Vars, params: &mut BTreeMap<String, Value>) -> Result<Graph> {
        if self.graph_file.is_some() {
            return self.load_graph_file();
        }
        let vertices = match &self.vertices {
            Some(p) => to_count("problem.vertices", expr_only("problem.vertices", p, vars)?)? as usize,
            None if self.problem == ProblemName::VcNode => n,
            None => match self.graph {
                GraphKind::Star | GraphKind::Path => n + 1,
                GraphKind::Complete => {
                    let v = (1..=2 * n + 2).find(|v| v * (v - 1) / 2 >= n).unwrap();
                    if v * (v - 1) / 2 != n {
                        return Err(Error::Config(format!(
                            "no complete graph has exactly {n} edges"
                        )));
                    }
                    v
                }
            },
        };
        params.insert("graph".into(), json!(self.graph.to_string()));
        params.insert("vertices".into(), json!(vertices));
        Ok(Graph::generate(self.graph, vertices))
    }

    fn build_problem(
        &self,
        n: usize,
        vars: &Vars,
        params: &mut BTreeMap<String, Value>,
    ) -> Result<Box<dyn Problem>> {
        let d = || -> Result<usize> {
            let p = self
                .d
                .as_ref()
                .ok_or_else(|| Error::Config(format!("problem {} needs problem.d", self.problem.name())))?;
            Ok(to_count("problem.d", expr_only("problem.d", p, vars)?)? as usize)
        };
        let real = |key: &str, p: &Option<Param>, default: f64| -> Result<f64> {
            match p {
                None | Some(Param::Auto) => Ok(default),
                Some(p) => expr_only(key, p, vars),
            }
        };
        let problem: Box<dyn Problem> = match self.problem {
            ProblemName::OneMax => Box::new(OneMax::new(n)),
            ProblemName::LeadingOnes => Box::new(LeadingOnes::new(n)),
            ProblemName::Trap => Box::new(Trap::new(n)),
            ProblemName::Jump => Box::new(Jump::new(n, d()?)?),
            ProblemName::Cliff => Box::new(Cliff::new(n, d()?)?),
            ProblemName::HiddenPath => {
                let eps = real("problem.eps", &self.eps, HiddenPath::DEFAULT_EPS)?;
                params.insert("eps".into(), json!(eps));
                Box::new(HiddenPath::new(n, eps)?)
            }
            ProblemName::PartitionWeps => {
                let eps = real("problem.eps", &self.eps, 0.2)?;
                let approx = real("problem.eps_approx", &self.eps_approx, 0.0)?;
                params.insert("eps".into(), json!(eps));
                params.insert("eps_approx".into(), json!(approx));
                Box::new(Partition::new(make_w_eps(n, eps)?, approx)?)
            }
            ProblemName::Partition => {
                let approx = real("problem.eps_approx", &self.eps_approx, 0.0)?;
                params.insert("eps_approx".into(), json!(approx));
                Box::new(Partition::new(self.load_instance()?, approx)?)
            }
            ProblemName::VcNode => Box::new(VertexCoverNode::new(self.build_graph(n, vars, params)?)),
            ProblemName::VcEdge => Box::new(VertexCoverEdge::new(self.build_graph(n, vars, params)?)),
        };
        if problem.dimension() != n {
            return Err(Error::Config(format!(
                "problem {} has dimension {}, requested n={n}",
                problem.descriptor(),
                problem.dimension()
            )));
        }
        Ok(problem)
    }

    /// Bind every parameter at dimension `n` for `algorithm`.
    pub fn resolve(&self, algorithm: Algorithm, n: usize) -> Result<ResolvedRun> {
        let mut vars = Vars::new();
        vars.insert("n".into(), n as f64);
        let mut params = BTreeMap::new();
        if let Some(p) = &self.d {
            let d = to_count("problem.d", expr_only("problem.d", p, &vars)?)?;
            vars.insert("d".into(), d as f64);
            params.insert("d".into(), json!(d));
        }
        let problem = self.build_problem(n, &vars, &mut params)?;

        let kind = algorithm.operator_kind();
        let mut op = OperatorConfig::new(kind);
        let real = |key: &str, p: &Option<Param>| -> Result<Option<f64>> {
            match p {
                None | Some(Param::Auto) => Ok(None),
                Some(p) => expr_only(key, p, &vars).map(Some),
            }
        };
        match kind {
            OperatorKind::FcmGamma => {
                let g = real("operator.gamma", &self.gamma)?
                    .unwrap_or_else(|| ParabolicEvalDist::default_gamma(n));
                if !(g > 0.0 && g <= 1.0) {
                    return Err(Error::Config(format!(
                        "operator.gamma must lie in (0,1], got {g}"
                    )));
                }
                op.gamma = Some(g);
                params.insert("gamma".into(), json!(g));
            }
            OperatorKind::FcmBeta | OperatorKind::HmpBeta | OperatorKind::EaBeta => {
                let b = real("operator.beta", &self.beta)?.unwrap_or(1.5);
                op.beta = Some(b);
                params.insert("beta".into(), json!(b));
                if kind == OperatorKind::EaBeta {
                    op.extended = self.extended;
                    op.mode = self.mode;
                    params.insert("extended".into(), json!(self.extended));
                    params.insert("mode".into(), json!(self.mode.to_string()));
                }
            }
            OperatorKind::EaUnif => {
                let p1 = real("operator.p1", &self.p1)?.unwrap_or(1.0 / std::f64::consts::E);
                op.p1 = Some(p1);
                params.insert("p1".into(), json!(p1));
            }
            OperatorKind::Sbm => {
                let r = real("operator.rate", &self.rate)?.unwrap_or(1.0 / n as f64);
                op.rate = Some(r);
                params.insert("rate".into(), json!(r));
            }
            _ => {}
        }

        let budget = match &self.budget {
            None => Some(DEFAULT_BUDGET),
            Some(Param::Infinite) => None,
            Some(Param::Auto) => {
                return Err(Error::Config("engine.budget has no automatic value".into()))
            }
            Some(p) => Some(to_count("engine.budget", expr_only("engine.budget", p, &vars)?.ceil())?),
        };
        params.insert("budget".into(), budget.map_or(Value::Null, |b| json!(b)));

        let tau = match &self.tau {
            None if algorithm.is_population_based() => Some(Param::Auto),
            None => None,
            Some(p) => Some(p.clone()),
        };
        let ageing = match tau {
            None => None,
            Some(tau) => {
                let tau = match tau {
                    Param::Auto => Some((2.0 * n as f64 * (n as f64).ln()).ceil().max(1.0) as u64),
                    Param::Infinite => None,
                    p => Some(to_count("engine.tau", p.value("engine.tau", &vars)?.unwrap().ceil())?),
                };
                let count = |key: &str, p: &Option<Param>| -> Result<usize> {
                    match p {
                        None | Some(Param::Auto) => Ok(1),
                        Some(p) => Ok(to_count(key, expr_only(key, p, &vars)?)? as usize),
                    }
                };
                let mut a = AgeingConfig::new(count("engine.mu", &self.mu)?, count("engine.dup", &self.dup)?, tau);
                if let Some(p) = real("engine.pdie", &self.pdie)? {
                    a = a.with_p_die(p);
                }
                a.validate()?;
                params.insert("mu".into(), json!(a.mu));
                params.insert("dup".into(), json!(a.dup));
                params.insert("tau".into(), a.tau.map_or(Value::Null, |t| json!(t)));
                params.insert("p_die".into(), json!(a.p_die()));
                Some(a)
            }
        };
        let engine = if ageing.is_some() {
            Engine::OptIa
        } else {
            Engine::OnePlusOne
        };
        params.insert(
            "engine".into(),
            json!(match engine {
                Engine::OnePlusOne => "one-plus-one",
                Engine::OptIa => "opt-ia",
            }),
        );

        let init = match &self.init_ones {
            None => Init::Uniform,
            Some(p) => {
                let k = to_count("problem.init_ones", expr_only("problem.init_ones", p, &vars)?)? as usize;
                if k > n {
                    return Err(Error::Config(format!("problem.init_ones={k} exceeds n={n}")));
                }
                params.insert("init_ones".into(), json!(k));
                Init::RandomWithOnes(k)
            }
        };

        Ok(ResolvedRun {
            algorithm,
            n,
            problem,
            config: RunConfig {
                operator: op,
                engine,
                ageing,
                budget,
                init,
                seed: self.seed,
            },
            params,
        })
    }
}
