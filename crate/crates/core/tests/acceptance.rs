//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the verdict lines are always
//! visible. `ACCEPTANCE_ONLY=A2,A7` restricts the run to a subset.

#![allow(clippy::type_complexity, clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use hypermut::algorithms::{run_with, OptIa};
use hypermut::distributions::{
    ParabolicEvalDist, PowerLawRateDist, SizeDistribution, SymmetricPowerLawDist, UniformHeavyTailDist,
};
use hypermut::harness::{self, aggregate, fit_scaling, run_sweep, Algorithm, ExperimentSpec, Summary, SweepRecord, Vars};
use hypermut::problems::{
    make_w_eps, Cliff, Flat, Graph, GraphKind, HiddenPath, Jump, LeadingOnes, OneMax, Trap, VertexCoverNode,
};
use hypermut::{
    AgeingConfig, BitString, Direction, EvalContext, Individual, Init, Operator, OperatorConfig, OperatorKind,
    Problem, RandomSource, RunConfig,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn sweep(pairs: &[(&str, &str)]) -> Vec<SweepRecord> {
    let map: BTreeMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let spec = ExperimentSpec::from_map(&map).expect("valid experiment");
    run_sweep(&spec).expect("sweep runs")
}

fn summarise(records: &[SweepRecord], algorithm: Algorithm) -> Vec<Summary> {
    let obs: Vec<_> = harness::rows(records)
        .iter()
        .filter(|r| r.algorithm == algorithm.name())
        .map(|r| r.observation())
        .collect();
    aggregate(&obs)
}

fn successes(records: &[SweepRecord], algorithm: Algorithm) -> usize {
    records
        .iter()
        .filter(|r| r.algorithm == algorithm && r.record.success)
        .count()
}

fn spread(summaries: &[Summary], model: &str) -> (f64, String) {
    let fit = fit_scaling(summaries, model, &Vars::new()).expect("fit");
    let ratios: Vec<String> = fit.points.iter().map(|p| format!("{}:{:.3}", p.n, p.ratio)).collect();
    (fit.spread, ratios.join(" "))
}

fn mean_at(summaries: &[Summary], n: usize) -> f64 {
    summaries.iter().find(|s| s.n == n).and_then(|s| s.mean).expect("successful runs")
}

fn all_succeeded(summaries: &[Summary]) -> bool {
    summaries.iter().all(|s| s.success_rate == 1.0)
}

// ---------------------------------------------------------------------------

fn a1() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [50usize, 100] {
        let gamma = 1.0 / (n as f64).ln();
        // expectation straight from the per-step probabilities
        let exact: f64 = (1..=n)
            .map(|i| {
                if i == 1 || i == n {
                    (-1f64).exp()
                } else {
                    gamma / i.min(n - i) as f64
                }
            })
            .sum();
        let closed = 2.0 / std::f64::consts::E + 2.0 * gamma * (2..=n / 2).map(|i| 1.0 / i as f64).sum::<f64>();

        let flat = Flat::new(n);
        let op = Operator::new(OperatorConfig::new(OperatorKind::FcmGamma).with_gamma(gamma), n).unwrap();
        let parent = Individual::new(BitString::zeros(n), 0.0);
        let mut ctx = EvalContext::without_target_stop(&flat, None);
        let mut rng = RandomSource::new(101, n as u64);
        let calls = 1_000_000u64;
        let mut total = 0u64;
        for _ in 0..calls {
            total += op.apply_once(&parent, &mut ctx, &mut rng).unwrap().evals_used;
        }
        let mean = total as f64 / calls as f64;
        let dev = (mean / exact - 1.0).abs();
        pass &= dev < 0.01 && ctx.evaluations() == total;
        parts.push(format!(
            "n={n}: mean {mean:.4} vs step-sum {exact:.4} ({:.3}%), closed form 2/e+2γH {closed:.4} ({:+.1}%)",
            dev * 100.0,
            (mean / closed - 1.0) * 100.0
        ));
    }
    verdict(pass, parts.join("; "))
}

fn scaling(problem: &str, dims: &str, fast_model: &str, static_model: &str, seed: &str, gap_check: bool) -> Verdict {
    let recs = sweep(&[
        ("operator.algo", "fast-ia-gamma,one-plus-one-ia"),
        ("problem.name", problem),
        ("operator.gamma", "auto"),
        ("engine.budget", "inf"),
        ("engine.seed", seed),
        ("sweep.dims", dims),
        ("sweep.reps", "100"),
    ]);
    let fast = summarise(&recs, Algorithm::FastIaGamma);
    let stat = summarise(&recs, Algorithm::OnePlusOneIa);
    let (fs, fr) = spread(&fast, fast_model);
    let (ss, sr) = spread(&stat, static_model);
    let mut pass = fs < 1.6 && ss < 1.6 && all_succeeded(&fast) && all_succeeded(&stat);
    let mut detail = format!("fast vs {fast_model}: spread {fs:.3} [{fr}]; static vs {static_model}: spread {ss:.3} [{sr}]");
    if gap_check {
        let (lo, hi) = (fast.first().unwrap().n, fast.last().unwrap().n);
        let g_lo = mean_at(&stat, lo) / mean_at(&fast, lo);
        let g_hi = mean_at(&stat, hi) / mean_at(&fast, hi);
        pass &= g_hi / g_lo >= 4.0;
        detail.push_str(&format!(
            "; static/fast {g_lo:.2} at n={lo}, {g_hi:.2} at n={hi}, growth {:.2} (need >= 4)",
            g_hi / g_lo
        ));
    }
    verdict(pass, detail)
}

fn a2() -> Verdict {
    scaling("onemax", "64,128,256,512", "n*ln(n)", "n^2*ln(n)", "2", true)
}

fn a3() -> Verdict {
    scaling("leadingones", "64,128,256,512", "n^2", "n^3", "3", false)
}

fn a4() -> Verdict {
    let fast = sweep(&[
        ("operator.algo", "fast-ia-gamma"),
        ("problem.name", "trap"),
        ("operator.gamma", "auto"),
        ("engine.budget", "20*n*ln(n)*(1+ln(n)/ln(n))"),
        ("engine.seed", "4"),
        ("sweep.dims", "64"),
        ("sweep.reps", "100"),
    ]);
    let ea = sweep(&[
        ("operator.algo", "one-plus-one-ea"),
        ("problem.name", "trap"),
        ("engine.budget", "1e7"),
        ("engine.seed", "4"),
        ("sweep.dims", "64"),
        ("sweep.reps", "100"),
    ]);
    let fs = successes(&fast, Algorithm::FastIaGamma);
    let es = successes(&ea, Algorithm::OnePlusOneEa);
    verdict(
        fs >= 90 && es == 0,
        format!("fast-ia-gamma {fs}/100 within 40 n ln n (need >= 90); one-plus-one-ea {es}/100 within 1e7 (need 0)"),
    )
}

fn a5() -> Verdict {
    let recs = sweep(&[
        ("operator.algo", "fast-ia-gamma"),
        ("problem.name", "jump"),
        ("problem.d", "3"),
        ("problem.init_ones", "n-d"),
        ("operator.gamma", "auto"),
        ("engine.budget", "inf"),
        ("engine.seed", "5"),
        ("sweep.dims", "20"),
        ("sweep.reps", "200"),
    ]);
    let s = summarise(&recs, Algorithm::FastIaGamma);
    let (n, d) = (20.0f64, 3.0f64);
    let gamma = 1.0 / n.ln();
    let model = (d / gamma) * 1140.0 * (1.0 + gamma * n.ln());
    let mean = s[0].mean.unwrap();
    let r = mean / model;
    verdict(
        all_succeeded(&s) && (0.5..=2.0).contains(&r),
        format!("mean {mean:.0} vs (d/γ)·C(20,3)·(1+γ ln n) = {model:.0}, ratio {r:.3} (need within factor 2)"),
    )
}

fn a6() -> Verdict {
    let base = |gamma: &'static str| {
        sweep(&[
            ("operator.algo", "opt-ia-gamma"),
            ("problem.name", "cliff"),
            ("problem.d", "10"),
            ("operator.gamma", gamma),
            ("engine.mu", "3"),
            ("engine.dup", "2"),
            ("engine.tau", "2*n*ln(n)"),
            ("engine.budget", "1e7"),
            ("engine.seed", "6"),
            ("sweep.dims", "40"),
            ("sweep.reps", "100"),
        ])
    };
    let small = successes(&base("1/(n*ln(n)^2)"), Algorithm::OptIaGamma);
    let large = successes(&base("1/ln(n)"), Algorithm::OptIaGamma);
    let ea = sweep(&[
        ("operator.algo", "one-plus-one-ea"),
        ("problem.name", "cliff"),
        ("problem.d", "10"),
        ("engine.budget", "1e7"),
        ("engine.seed", "6"),
        ("sweep.dims", "40"),
        ("sweep.reps", "100"),
    ]);
    let es = successes(&ea, Algorithm::OnePlusOneEa);
    verdict(
        small >= 80 && large <= 20 && es == 0,
        format!(
            "γ=1/(n ln²n): {small}/100 (need >= 80); γ=1/ln n: {large}/100 (need <= 20); one-plus-one-ea: {es}/100 (need 0)"
        ),
    )
}

fn a7() -> Verdict {
    let fast = sweep(&[
        ("operator.algo", "fast-ia-gamma"),
        ("problem.name", "partition-weps"),
        ("problem.eps", "0.2"),
        ("problem.eps_approx", "0"),
        ("operator.gamma", "auto"),
        ("engine.budget", "1e6"),
        ("engine.seed", "7"),
        ("sweep.dims", "50"),
        ("sweep.reps", "100"),
    ]);
    let ea = sweep(&[
        ("operator.algo", "one-plus-one-ea"),
        ("problem.name", "partition-weps"),
        ("problem.eps", "0.2"),
        ("problem.eps_approx", "0"),
        ("engine.budget", "1e6"),
        ("engine.seed", "7"),
        ("sweep.dims", "50"),
        ("sweep.reps", "100"),
    ]);
    let optimum = make_w_eps(50, 0.2).unwrap().reference_optimum();
    let fs = fast.iter().filter(|r| r.record.success).count();
    let threshold = (4.0 / 3.0 - 0.2) * optimum;
    let stuck = ea
        .iter()
        .filter(|r| r.record.best_fitness.unwrap() >= threshold - 1e-9)
        .count();
    verdict(
        fs >= 95 && stuck >= 20,
        format!(
            "fast-ia-gamma reached makespan 1/2 in {fs}/100 (need >= 95); one-plus-one-ea ended at or above (4/3-ε)·OPT = {threshold:.4} in {stuck}/100 (need >= 20)"
        ),
    )
}

fn vertex_cover(problem: &str, dims: &str, seed: &str) -> Verdict {
    let recs = sweep(&[
        ("operator.algo", "fast-ia-gamma,one-plus-one-ia"),
        ("problem.name", problem),
        ("problem.graph", "star"),
        ("operator.gamma", "auto"),
        ("engine.budget", "inf"),
        ("engine.seed", seed),
        ("sweep.dims", dims),
        ("sweep.reps", "100"),
    ]);
    let fast = summarise(&recs, Algorithm::FastIaGamma);
    let stat = summarise(&recs, Algorithm::OnePlusOneIa);
    let (fs, fr) = spread(&fast, "n*ln(n)");
    let (ss, sr) = spread(&stat, "n^2*ln(n)");
    let means: Vec<String> = fast
        .iter()
        .zip(&stat)
        .map(|(f, s)| format!("{}:{:.1}/{:.1}", f.n, f.mean.unwrap(), s.mean.unwrap()))
        .collect();
    verdict(
        fs < 1.8 && ss < 1.8 && all_succeeded(&fast) && all_succeeded(&stat),
        format!(
            "fast vs n ln n: spread {fs:.3} [{fr}]; static vs n² ln n: spread {ss:.3} [{sr}]; means fast/static [{}]",
            means.join(" ")
        ),
    )
}

fn a8() -> Verdict {
    vertex_cover("vc-node", "64,128,256", "8")
}

fn a9() -> Verdict {
    vertex_cover("vc-edge", "63,127,255", "9")
}

/// Expected RLS evaluations on OneMax from a uniform start, via the
/// fundamental matrix of the absorbing chain over the number of ones.
fn rls_onemax_oracle(n: usize) -> f64 {
    // transient states 0..n-1; solve (I - Q) t = 1
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for i in 0..n {
        let up = (n - i) as f64 / n as f64;
        a[i][i] = 1.0 - (1.0 - up);
        if i + 1 < n {
            a[i][i + 1] = -up;
        }
        a[i][n] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let steps: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    let mut binom = 1.0f64;
    let mut expected = 1.0;
    for (i, t) in steps.iter().enumerate() {
        expected += binom / 2f64.powi(n as i32) * t;
        binom = binom * (n - i) as f64 / (i + 1) as f64;
    }
    expected
}

fn a10() -> Verdict {
    let n = 6;
    let oracle = rls_onemax_oracle(n);
    let problem = OneMax::new(n);
    let config = RunConfig::one_plus_one(OperatorConfig::new(OperatorKind::RlsFlip), None, 10);
    let op = Operator::new(config.operator.clone(), n).unwrap();
    let reps = 100_000u64;
    let total: u64 = (0..reps)
        .map(|r| {
            let rec = run_with(&problem, &config, &op, r).unwrap();
            assert!(rec.success);
            rec.evaluations
        })
        .sum();
    let mean = total as f64 / reps as f64;
    let dev = (mean / oracle - 1.0).abs();
    verdict(
        dev < 0.02,
        format!("mean {mean:.4} vs chain expectation {oracle:.4} ({:.3}%)", dev * 100.0),
    )
}

// --- property suites --------------------------------------------------------

fn distribution_properties() -> Result<(), String> {
    for n in [2usize, 3, 7, 50, 101, 1000] {
        for gamma in [0.05, 0.3, 1.0] {
            let d = ParabolicEvalDist::new(n, gamma).unwrap();
            for i in 2..n.saturating_sub(1) {
                if (d.p(i) - d.p(n - i)).abs() > 1e-12 {
                    return Err(format!("parabolic asymmetric at n={n} i={i}"));
                }
            }
        }
        for beta in [1.0, 1.5, 3.0] {
            let d = SymmetricPowerLawDist::new(n, beta).unwrap();
            let sum: f64 = d.table().probabilities().iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(format!("power law sums to {sum} at n={n}"));
            }
            for i in 0..=n {
                if (d.p(i) - d.p(n - i)).abs() > 1e-12 {
                    return Err(format!("power law asymmetric at n={n} i={i}"));
                }
            }
            if beta > 1.0 {
                for ext in [false, true] {
                    let r = PowerLawRateDist::new(n.max(2), beta, ext).unwrap();
                    let s: f64 = r.table().probabilities().iter().sum();
                    if (s - 1.0).abs() > 1e-12 {
                        return Err(format!("rate law sums to {s}"));
                    }
                }
            }
        }
        let u = UniformHeavyTailDist::new(n.max(2), 1.0 / std::f64::consts::E).unwrap();
        let s: f64 = u.table().probabilities().iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(format!("uniform heavy tail sums to {s}"));
        }
    }
    Ok(())
}

fn unbiasedness() -> Result<(), String> {
    let n = 16;
    let flat = Flat::new(n);
    let samples = 40_000;
    let critical = ChiSquared::new((n - 1) as f64).unwrap().inverse_cdf(0.999);
    for kind in OperatorKind::ALL {
        let op = Operator::new(OperatorConfig::new(kind), n).unwrap();
        let mut rng = RandomSource::new(77, kind as u64);
        let mut parent_rng = RandomSource::new(78, kind as u64);
        let mut counts = vec![0u64; n];
        let mut drawn = 0u64;
        let mut ctx = EvalContext::without_target_stop(&flat, None);
        while drawn < samples {
            let parent = Individual::new(BitString::random(n, &mut parent_rng), 0.0);
            let out = op.apply_once(&parent, &mut ctx, &mut rng).unwrap();
            let diff: Vec<usize> = (0..n)
                .filter(|&i| out.offspring.genotype.get(i) != parent.genotype.get(i))
                .collect();
            if diff.is_empty() {
                continue;
            }
            use rand::Rng;
            counts[diff[parent_rng.gen_range(0..diff.len())]] += 1;
            drawn += 1;
        }
        let e = samples as f64 / n as f64;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        if stat > critical {
            return Err(format!("{kind}: chi-squared {stat:.1} > {critical:.1}"));
        }
    }
    Ok(())
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

fn ledger_exactness() -> Result<(), String> {
    for kind in OperatorKind::ALL {
        for budget in [997u64, 200_000] {
            for opt_ia in [false, true] {
                let p = Counting {
                    inner: Jump::new(24, 2).unwrap(),
                    calls: AtomicU64::new(0),
                };
                let op = OperatorConfig::new(kind);
                let config = if opt_ia {
                    RunConfig::opt_ia(op, AgeingConfig::new(3, 2, Some(50)), Some(budget), 5)
                } else {
                    RunConfig::one_plus_one(op, Some(budget), 5)
                };
                let rec = hypermut::algorithms::run(&p, &config, 0).map_err(|e| e.to_string())?;
                let calls = p.calls.load(Ordering::Relaxed);
                if rec.evaluations != calls {
                    return Err(format!("{kind}: ledger {} vs {calls} calls", rec.evaluations));
                }
                if calls > budget {
                    return Err(format!("{kind}: {calls} calls exceed budget {budget}"));
                }
            }
        }
    }
    Ok(())
}

fn step_order() -> Result<(), String> {
    let problem = Cliff::new(30, 6).unwrap();
    for (kind, mu, dup, tau) in [
        (OperatorKind::FcmGamma, 3, 2, Some(20u64)),
        (OperatorKind::FcmBeta, 5, 1, Some(3)),
        (OperatorKind::RlsFlip, 2, 3, None),
    ] {
        let op = Operator::new(OperatorConfig::new(kind), 30).unwrap();
        let ageing = AgeingConfig::new(mu, dup, tau);
        let mut ia = OptIa::new(&problem, &op, ageing, Some(100_000), &Init::Uniform, RandomSource::new(3, 0))
            .map_err(|e| e.to_string())?;
        while ia.halted().is_none() {
            if ia.population().len() != mu {
                return Err(format!("population {} != µ={mu}", ia.population().len()));
            }
            let ages: Vec<u64> = ia.population().iter().map(|i| i.age).collect();
            let Ok(stats) = ia.generation() else { break };
            if stats.mutants.len() != mu * dup {
                return Err(format!("{} mutants, expected {}", stats.mutants.len(), mu * dup));
            }
            for (k, &(parent_age, child_age, improved)) in stats.mutants.iter().enumerate() {
                if parent_age != ages[k / dup] + 1 {
                    return Err("ages not incremented before cloning".into());
                }
                if child_age != if improved { 0 } else { parent_age } {
                    return Err("clone age rule violated".into());
                }
            }
            if stats.filled + (mu * (dup + 1) - stats.removed) != mu + stats.truncated {
                return Err("fill/truncate accounting broken".into());
            }
            if tau.is_none() && stats.removed != 0 {
                return Err("removal without ageing".into());
            }
        }
    }
    Ok(())
}

fn exhaustive_problems() -> Result<(), String> {
    for n in 1..=14usize {
        let problems: Vec<(Box<dyn Problem>, Box<dyn Fn(&[bool]) -> f64>)> = {
            let mut v: Vec<(Box<dyn Problem>, Box<dyn Fn(&[bool]) -> f64>)> = vec![
                (Box::new(OneMax::new(n)), Box::new(|b: &[bool]| b.iter().filter(|&&x| x).count() as f64)),
                (
                    Box::new(LeadingOnes::new(n)),
                    Box::new(|b: &[bool]| b.iter().take_while(|&&x| x).count() as f64),
                ),
                (
                    Box::new(Trap::new(n)),
                    Box::new(move |b: &[bool]| {
                        let ones = b.iter().filter(|&&x| x).count();
                        if ones == 0 {
                            (n + 1) as f64
                        } else {
                            ones as f64
                        }
                    }),
                ),
            ];
            for d in 1..n {
                v.push((
                    Box::new(Jump::new(n, d).unwrap()),
                    Box::new(move |b: &[bool]| {
                        let ones = b.iter().filter(|&&x| x).count();
                        if ones == n || ones + d <= n {
                            (ones + d) as f64
                        } else {
                            (n - ones) as f64
                        }
                    }),
                ));
                v.push((
                    Box::new(Cliff::new(n, d).unwrap()),
                    Box::new(move |b: &[bool]| {
                        let ones = b.iter().filter(|&&x| x).count() as f64;
                        if ones <= (n - d) as f64 {
                            ones
                        } else {
                            ones - d as f64 + 0.5
                        }
                    }),
                ));
            }
            v
        };
        let limit = if n <= 10 { 1usize << n } else { 4096 };
        let mut rng = RandomSource::new(n as u64, 99);
        for code in 0..limit {
            let bits: Vec<bool> = if n <= 10 {
                (0..n).map(|i| code >> i & 1 == 1).collect()
            } else {
                use rand::Rng;
                (0..n).map(|_| rng.gen_bool(0.5)).collect()
            };
            let x = BitString::from_bits(&bits);
            for (p, oracle) in &problems {
                let f = p.evaluate(&x);
                if f != oracle(&bits) {
                    return Err(format!("{} at {x}: {f} vs {}", p.descriptor(), oracle(&bits)));
                }
            }
        }
    }
    for v in 2..=8usize {
        for kind in [GraphKind::Star, GraphKind::Complete, GraphKind::Path] {
            let g = Graph::generate(kind, v);
            let p = VertexCoverNode::new(g.clone());
            for code in 0..1usize << v {
                let bits: Vec<bool> = (0..v).map(|i| code >> i & 1 == 1).collect();
                let x = BitString::from_bits(&bits);
                let cover = g.edges().iter().all(|&(a, b)| bits[a] || bits[b]);
                let f = p.evaluate(&x);
                if (p.penalty(&x) == 0.0) != cover || p.is_target(&x, f) != cover {
                    return Err(format!("vc-node {kind} v={v} at {x}"));
                }
            }
        }
    }
    Ok(())
}

fn hidden_path_unique_optimum() -> Result<(), String> {
    let n = 32;
    let hp = HiddenPath::new(n, HiddenPath::DEFAULT_EPS).unwrap();
    let end = hp.path_end();
    let best = hp.evaluate(&end);
    let mut visited = 0u64;
    let mut stack: Vec<(BitString, usize, usize)> = vec![(BitString::ones(n), 0, 0)];
    while let Some((x, from, zeros)) = stack.pop() {
        visited += 1;
        let f = hp.evaluate(&x);
        if x != end && f >= best {
            return Err(format!("{x} reaches {f} >= {best}"));
        }
        if zeros < 6 {
            for i in from..n {
                let mut y = x.clone();
                y.toggle(i);
                stack.push((y, i + 1, zeros + 1));
            }
        }
    }
    if visited != 1_149_017 {
        return Err(format!("visited {visited} strings"));
    }
    let mut rng = RandomSource::new(32, 0);
    for _ in 0..200_000 {
        let x = BitString::random(n, &mut rng);
        if x != end && hp.evaluate(&x) >= best {
            return Err(format!("{x} ties the optimum"));
        }
    }
    Ok(())
}

fn replay() -> Result<(), String> {
    let pairs = [
        ("operator.algo", "fast-ia-beta-hmp,opt-ia-gamma,fast-ea-unif"),
        ("problem.name", "jump"),
        ("problem.d", "2"),
        ("engine.mu", "2"),
        ("engine.seed", "12345"),
        ("sweep.dims", "12,16"),
        ("sweep.reps", "5"),
    ];
    let csv = |jobs: &'static str| {
        let mut p = pairs.to_vec();
        p.push(("sweep.jobs", jobs));
        let mut buf = Vec::new();
        harness::write_runs(&mut buf, &harness::rows(&sweep(&p))).unwrap();
        buf
    };
    let (a, b, c) = (csv("1"), csv("1"), csv("2"));
    if a != b || a != c {
        return Err("replayed CSV differs".into());
    }
    Ok(())
}

fn a11() -> Verdict {
    let suites: [(&str, fn() -> Result<(), String>); 7] = [
        ("distributions", distribution_properties),
        ("unbiasedness", unbiasedness),
        ("ledger", ledger_exactness),
        ("step-order", step_order),
        ("exhaustive", exhaustive_problems),
        ("hiddenpath-optimum", hidden_path_unique_optimum),
        ("replay", replay),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f) in suites {
        match f() {
            Ok(()) => parts.push(format!("{name} ok")),
            Err(e) => {
                pass = false;
                parts.push(format!("{name} FAILED ({e})"));
            }
        }
    }
    verdict(pass, parts.join(", "))
}

fn hidden_path_soft() -> Verdict {
    let recs = sweep(&[
        ("operator.algo", "opt-ia-gamma"),
        ("problem.name", "hiddenpath"),
        ("operator.gamma", "1/(5*ln(n))"),
        ("engine.mu", "log(n)"),
        ("engine.dup", "1"),
        ("engine.tau", "4*n*ln(n)^3"),
        ("engine.budget", "1e8"),
        ("engine.seed", "13"),
        ("sweep.dims", "32"),
        ("sweep.reps", "20"),
    ]);
    let s = successes(&recs, Algorithm::OptIaGamma);
    let mean: f64 = recs.iter().map(|r| r.runtime() as f64).sum::<f64>() / recs.len() as f64;
    verdict(
        s >= 10,
        format!("{s}/20 within 1e8 (need >= 10), mean evaluations {mean:.0}"),
    )
}

fn main() {
    let only: Option<Vec<String>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').map(|t| t.trim().to_uppercase()).collect());
    let criteria: [(&str, bool, fn() -> Verdict); 12] = [
        ("A1", false, a1),
        ("A2", false, a2),
        ("A3", false, a3),
        ("A4", false, a4),
        ("A5", false, a5),
        ("A6", false, a6),
        ("A7", false, a7),
        ("A8", false, a8),
        ("A9", false, a9),
        ("A10", false, a10),
        ("A11", false, a11),
        ("HP", true, hidden_path_soft),
    ];
    let mut failed = Vec::new();
    for (id, soft, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.iter().any(|t| t == id)) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let status = match (v.pass, soft) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (soft)",
        };
        println!("{id:<4} {status:<11} [{:>6.1}s] {}", start.elapsed().as_secs_f64(), v.detail);
        if !v.pass && !soft {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all primary criteria passed");
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        std::process::exit(1);
    }
}
