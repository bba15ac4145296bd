use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypermut::harness::{self, aggregate, fit_scaling_with, run_sweep, Expr, ExperimentSpec, RunRow, Vars};
use hypermut::problems::{make_w_eps, Graph, GraphKind};

mod config;

/// Fast hypermutation experiments: single runs, sweeps, fits and instances.
#[derive(Parser, Debug)]
#[command(name = "hypermut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm once and print its CSV row.
    ///
    /// Exit status: 0 target reached, 2 budget exhausted, 1 configuration
    /// error, 3 I/O error.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Problem dimension.
        #[arg(long)]
        n: Option<String>,
    },
    /// Run every algorithm at every dimension and write per-run and summary CSVs.
    Sweep {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Comma-separated dimensions, e.g. 64,128,256.
        #[arg(long)]
        dims: Option<String>,
        /// Replications per algorithm and dimension.
        #[arg(long)]
        reps: Option<String>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<String>,
        /// Per-run CSV path; summaries are written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scaling model for the summary ratio column, e.g. "n*ln(n)".
        #[arg(long)]
        model: Option<String>,
    },
    /// Fit a scaling model to a per-run CSV and print the report.
    Fit {
        /// Per-run CSV written by `sweep`.
        results: PathBuf,
        /// Model expression in n: + - * / ^, log (base 2), ln, sqrt, exp, binom(a,b).
        #[arg(long)]
        model: String,
        /// Only fit this algorithm.
        #[arg(long)]
        algo: Option<String>,
    },
    /// Write problem instances.
    Instance {
        #[command(subcommand)]
        kind: InstanceKind,
    },
}

#[derive(Subcommand, Debug)]
enum InstanceKind {
    /// Worst-case two-machine Partition weights, one per line.
    PartitionWeps {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generated graph in DIMACS edge format.
    Graph {
        #[arg(long, value_enum)]
        kind: GraphArg,
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphArg {
    Star,
    Complete,
    Path,
}

impl From<GraphArg> for GraphKind {
    fn from(g: GraphArg) -> Self {
        match g {
            GraphArg::Star => GraphKind::Star,
            GraphArg::Complete => GraphKind::Complete,
            GraphArg::Path => GraphKind::Path,
        }
    }
}

/// Flags shared by `run` and `sweep`. Numeric values accept expressions in
/// `n` and `d` such as `n/4` or `2*n*ln(n)`.
#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// TOML file with [engine], [operator], [problem] and [sweep] tables.
    /// Flags override file values; --set overrides both.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw override, e.g. --set engine.mu=3 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Algorithm name(s), comma-separated: rls, one-plus-one-ea,
    /// one-plus-one-ia, one-plus-one-ia-plain, fast-ia-gamma,
    /// fast-ia-beta-fcm, fast-ia-beta-hmp, fast-ea-beta, fast-ea-unif,
    /// opt-ia-gamma, opt-ia-beta.
    #[arg(long)]
    algo: Option<String>,
    /// Evaluation parameter in (0,1]; `auto` = 1/ln n.
    #[arg(long)]
    gamma: Option<String>,
    /// Power-law exponent; default 1.5.
    #[arg(long)]
    beta: Option<String>,
    /// Probability of a single-bit step for fast-ea-unif; default 1/e.
    #[arg(long)]
    p1: Option<String>,
    /// Mutation rate for one-plus-one-ea; default 1/n.
    #[arg(long)]
    rate: Option<String>,
    /// Let fast-ea-beta rates range up to n instead of n/2.
    #[arg(long)]
    extended: bool,
    /// fast-ea-beta mode: rate or exact-k.
    #[arg(long)]
    mode: Option<String>,

    /// onemax, leadingones, trap, jump, cliff, hiddenpath, partition-weps,
    /// partition, vc-node, vc-edge.
    #[arg(long)]
    problem: Option<String>,
    /// Gap length for jump and cliff.
    #[arg(long)]
    d: Option<String>,
    /// Instance parameter for hiddenpath (default 0.5) and partition-weps (default 0.2).
    #[arg(long)]
    eps: Option<String>,
    /// Partition target: makespan within (1+eps_approx) of the optimum.
    #[arg(long)]
    eps_approx: Option<String>,
    /// Generated graph family for vertex cover: star, complete, path.
    #[arg(long)]
    graph: Option<String>,
    /// Vertex count of the generated graph (vc-edge default: sized so m = n).
    #[arg(long)]
    vertices: Option<String>,
    /// DIMACS graph file for vertex cover.
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Weight file for partition.
    #[arg(long)]
    instance_file: Option<PathBuf>,
    /// Start from a uniformly random point with this many ones.
    #[arg(long)]
    init_ones: Option<String>,

    /// Evaluation budget; `inf` for none. Default 1e7.
    #[arg(long)]
    budget: Option<String>,
    /// Opt-IA population size; default 1.
    #[arg(long)]
    mu: Option<String>,
    /// Opt-IA clones per individual; default 1.
    #[arg(long)]
    dup: Option<String>,
    /// Age threshold; `auto` = ceil(2 n ln n), `inf` disables removal.
    /// Setting it on a (1+1) algorithm runs it inside Opt-IA.
    #[arg(long)]
    tau: Option<String>,
    /// Removal probability at age tau; `auto` = 1 - 1/((dup+1) mu).
    #[arg(long)]
    pdie: Option<String>,
    /// Master seed; replication r uses stream r.
    #[arg(long)]
    seed: Option<String>,
}

impl ExperimentArgs {
    fn flag_pairs(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut put = |k: &'static str, val: &Option<String>| {
            if let Some(s) = val {
                v.push((k, s.clone()));
            }
        };
        put("operator.algo", &self.algo);
        put("operator.gamma", &self.gamma);
        put("operator.beta", &self.beta);
        put("operator.p1", &self.p1);
        put("operator.rate", &self.rate);
        put("operator.mode", &self.mode);
        put("problem.name", &self.problem);
        put("problem.d", &self.d);
        put("problem.eps", &self.eps);
        put("problem.eps_approx", &self.eps_approx);
        put("problem.graph", &self.graph);
        put("problem.vertices", &self.vertices);
        put("problem.init_ones", &self.init_ones);
        put("engine.budget", &self.budget);
        put("engine.mu", &self.mu);
        put("engine.dup", &self.dup);
        put("engine.tau", &self.tau);
        put("engine.pdie", &self.pdie);
        put("engine.seed", &self.seed);
        if self.extended {
            v.push(("operator.extended", "true".into()));
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        if let Some(p) = path(&self.graph_file) {
            v.push(("problem.graph_file", p));
        }
        if let Some(p) = path(&self.instance_file) {
            v.push(("problem.instance_file", p));
        }
        v
    }

    /// File values, then flags, then `--set` overrides.
    fn to_map(&self, extra: Vec<(&'static str, String)>) -> Result<BTreeMap<String, String>, Failure> {
        let mut map = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Io(anyhow::anyhow!("{}: {e}", path.display())))?;
                config::flatten(&text).map_err(Failure::Config)?
            }
            None => BTreeMap::new(),
        };
        for (k, v) in self.flag_pairs().into_iter().chain(extra) {
            map.insert(k.to_string(), v);
        }
        for o in &self.overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Failure::Config(anyhow::anyhow!("--set expects KEY=VALUE, got {o:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(map)
    }
}

/// Failure classes with their exit codes.
#[derive(Debug)]
enum Failure {
    Config(anyhow::Error),
    Io(anyhow::Error),
}

impl From<hypermut::Error> for Failure {
    fn from(e: hypermut::Error) -> Self {
        match e {
            hypermut::Error::Io(_) => Failure::Io(e.into()),
            _ => Failure::Config(e.into()),
        }
    }
}

fn io<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Io(e.into())
}

fn spec_from(map: &BTreeMap<String, String>) -> Result<ExperimentSpec, Failure> {
    Ok(ExperimentSpec::from_map(map)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn cmd_run(exp: &ExperimentArgs, n: Option<String>) -> Result<ExitCode, Failure> {
    let mut extra = vec![("sweep.reps", "1".to_string()), ("sweep.jobs", "1".to_string())];
    if let Some(n) = n {
        extra.push(("sweep.dims", n));
    }
    let spec = spec_from(&exp.to_map(extra)?)?;
    if spec.algorithms.len() != 1 {
        return Err(Failure::Config(anyhow::anyhow!("run takes exactly one algorithm")));
    }
    if spec.dimensions()?.len() != 1 {
        return Err(Failure::Config(anyhow::anyhow!("run takes exactly one dimension (--n)")));
    }
    let records = run_sweep(&spec)?;
    let rows = harness::rows(&records);
    let mut buf = Vec::new();
    harness::write_runs(&mut buf, &rows)?;
    std::io::stdout().write_all(&buf).map_err(io)?;
    let r = &records[0].record;
    log::info!("{} evaluations, success {}", r.evaluations, r.success);
    Ok(if r.success {
        ExitCode::SUCCESS
    } else {
        eprintln!("budget exhausted after {} evaluations", r.evaluations);
        ExitCode::from(2)
    })
}

fn cmd_sweep(
    exp: &ExperimentArgs,
    dims: Option<String>,
    reps: Option<String>,
    jobs: Option<String>,
    out: Option<PathBuf>,
    model: Option<String>,
) -> Result<ExitCode, Failure> {
    let mut extra = Vec::new();
    for (k, v) in [("sweep.dims", dims), ("sweep.reps", reps), ("sweep.jobs", jobs), ("sweep.model", model)] {
        if let Some(v) = v {
            extra.push((k, v));
        }
    }
    if let Some(o) = out {
        extra.push(("sweep.out", o.display().to_string()));
    }
    let spec = spec_from(&exp.to_map(extra)?)?;
    let out = spec
        .out
        .clone()
        .ok_or_else(|| Failure::Config(anyhow::anyhow!("sweep needs an output path (--out or sweep.out)")))?;
    if let Some(m) = &spec.model {
        check_model(&spec, m)?;
    }
    let records = run_sweep(&spec)?;
    let rows = harness::rows(&records);

    let file = fs::File::create(&out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(io)?;
    harness::write_runs(std::io::BufWriter::new(file), &rows)?;

    let several = spec.algorithms.len() > 1;
    for algo in &spec.algorithms {
        let obs: Vec<_> = rows
            .iter()
            .filter(|r| r.algorithm == algo.name())
            .map(RunRow::observation)
            .collect();
        let summaries = aggregate(&obs);
        let fit = match &spec.model {
            Some(m) if summaries.iter().any(|s| s.mean.is_some()) => {
                Some(fit_scaling_with(&summaries, m, |n| vars_at(&rows, algo.name(), n))?)
            }
            _ => None,
        };
        let path = harness::summary_path(&out, several.then(|| algo.name()));
        let file = fs::File::create(&path)
            .with_context(|| format!("creating {}", path.display()))
            .map_err(io)?;
        harness::write_summary(file, &summaries, fit.as_ref())?;
        for s in &summaries {
            eprintln!(
                "{algo} n={} success {}/{} (95% CI {:.3}-{:.3}) mean {}",
                s.n,
                s.successes,
                s.runs,
                s.success_ci.0,
                s.success_ci.1,
                s.mean.map_or("-".into(), |m| format!("{m:.1}"))
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Model variables at dimension `n`: the numeric run parameters.
fn vars_at(rows: &[RunRow], algo: &str, n: usize) -> Vars {
    rows.iter()
        .find(|r| r.algorithm == algo && r.n == n)
        .map(RunRow::param_vars)
        .unwrap_or_default()
}

/// Evaluate the model at every planned point before spending any runs.
fn check_model(spec: &ExperimentSpec, model: &str) -> Result<(), Failure> {
    let expr = Expr::parse(model)?;
    for algo in &spec.algorithms {
        for &n in &spec.dimensions()? {
            let run = spec.resolve(*algo, n)?;
            let mut vars: Vars = run
                .params
                .iter()
                .filter_map(|(k, v)| v.as_f64().map(|x| (k.clone(), x)))
                .collect();
            vars.insert("n".into(), n as f64);
            let v = expr.eval(&vars)?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Failure::Config(anyhow::anyhow!(
                    "model {model:?} is not positive at n={n} for {algo}"
                )));
            }
        }
    }
    Ok(())
}

fn cmd_fit(results: &Path, model: &str, algo: Option<&str>) -> Result<ExitCode, Failure> {
    Expr::parse(model)?;
    let rows = harness::read_runs(results).map_err(|e| match e {
        hypermut::Error::Parse { .. } => Failure::Config(anyhow::anyhow!("{}: {e}", results.display())),
        other => other.into(),
    })?;
    let mut algos: Vec<&str> = rows.iter().map(|r| r.algorithm.as_str()).collect();
    algos.sort_unstable();
    algos.dedup();
    if let Some(a) = algo {
        algos.retain(|x| *x == a);
        if algos.is_empty() {
            return Err(Failure::Config(anyhow::anyhow!("no rows for algorithm {a:?}")));
        }
    }
    let mut out = String::new();
    for a in algos {
        let obs: Vec<_> = rows.iter().filter(|r| r.algorithm == a).map(RunRow::observation).collect();
        let summaries = aggregate(&obs);
        out.push_str(&format!("algorithm {a}, model {model}\n"));
        out.push_str("n,runs,success_rate,ci_low,ci_high,mean,model,ratio\n");
        match fit_scaling_with(&summaries, model, |n| vars_at(&rows, a, n)) {
            Ok(fit) => {
                for s in &summaries {
                    let p = fit.points.iter().find(|p| p.n == s.n);
                    out.push_str(&format!(
                        "{},{},{},{:.4},{:.4},{},{},{}\n",
                        s.n,
                        s.runs,
                        s.success_rate,
                        s.success_ci.0,
                        s.success_ci.1,
                        s.mean.map_or(String::new(), |m| m.to_string()),
                        p.map_or(String::new(), |p| p.model.to_string()),
                        p.map_or(String::new(), |p| p.ratio.to_string()),
                    ));
                }
                let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
                out.push_str(&format!(
                    "spread {:.4}\nslope {}\nr_squared {}\n\n",
                    fit.spread,
                    opt(fit.slope),
                    opt(fit.r_squared)
                ));
            }
            Err(e) => out.push_str(&format!("no fit: {e}\n\n")),
        }
    }
    write_out(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_instance(kind: InstanceKind) -> Result<ExitCode, Failure> {
    match kind {
        InstanceKind::PartitionWeps { n, eps, out } => {
            let inst = make_w_eps(n, eps)?;
            write_out(out.as_deref(), &inst.to_text())?;
        }
        InstanceKind::Graph { kind, n, out } => {
            if n == 0 {
                return Err(Failure::Config(anyhow::anyhow!("a graph needs at least one vertex")));
            }
            let g = Graph::generate(kind.into(), n);
            write_out(out.as_deref(), &g.to_dimacs())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run { exp, n } => cmd_run(&exp, n),
        Command::Sweep {
            exp,
            dims,
            reps,
            jobs,
            out,
            model,
        } => cmd_sweep(&exp, dims, reps, jobs, out, model),
        Command::Fit { results, model, algo } => cmd_fit(&results, &model, algo.as_deref()),
        Command::Instance { kind } => cmd_instance(kind),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
