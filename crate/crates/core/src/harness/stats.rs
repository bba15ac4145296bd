use statrs::distribution::{Beta, ContinuousCDF};

use super::expr::{Expr, Vars};
use crate::error::{Error, Result};

/// One run reduced to what aggregation needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub n: usize,
    pub success: bool,
    pub evaluations: u64,
}

/// Per-dimension runtime statistics over successful runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub runs: usize,
    pub successes: usize,
    /// `None` when no run succeeded.
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub stderr: Option<f64>,
    pub success_rate: f64,
    /// Clopper-Pearson 95% interval for the success rate.
    pub success_ci: (f64, f64),
}

// Bisection on the cdf; the library quantile stops at about 1e-5.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let dist = Beta::new(a, b).expect("positive shape");
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact two-sided binomial confidence interval at level `1 - alpha`.
pub fn clopper_pearson(successes: usize, trials: usize, alpha: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        beta_quantile(k, n - k + 1.0, alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        beta_quantile(k + 1.0, n - k, 1.0 - alpha / 2.0)
    };
    (lo, hi)
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        (sorted[m - 1] + sorted[m]) / 2.0
    }
}

/// Group by `n` (ascending) and summarise.
pub fn aggregate(observations: &[Observation]) -> Vec<Summary> {
    let mut dims: Vec<usize> = observations.iter().map(|o| o.n).collect();
    dims.sort_unstable();
    dims.dedup();
    dims.into_iter()
        .map(|n| {
            let group: Vec<&Observation> = observations.iter().filter(|o| o.n == n).collect();
            let mut values: Vec<f64> = group
                .iter()
                .filter(|o| o.success)
                .map(|o| o.evaluations as f64)
                .collect();
            values.sort_by(f64::total_cmp);
            let k = values.len();
            let (mean, med, se) = if k == 0 {
                (None, None, None)
            } else {
                let mean = values.iter().sum::<f64>() / k as f64;
                let se = if k > 1 {
                    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
                    var.sqrt() / (k as f64).sqrt()
                } else {
                    0.0
                };
                (Some(mean), Some(median(&values)), Some(se))
            };
            Summary {
                n,
                runs: group.len(),
                successes: k,
                mean,
                median: med,
                stderr: se,
                success_rate: k as f64 / group.len() as f64,
                success_ci: clopper_pearson(k, group.len(), 0.05),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitPoint {
    pub n: usize,
    pub mean: f64,
    pub model: f64,
    pub ratio: f64,
}

/// Constant-factor consistency of measured means with a model curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub model: String,
    pub points: Vec<FitPoint>,
    /// `max ratio / min ratio`.
    pub spread: f64,
    /// Least-squares slope of `ln mean` against `ln n`; needs two points.
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
}

/// Fit `model` (an expression in `n` plus any `extra` bindings) to the
/// dimensions of `summaries` that have a mean.
pub fn fit_scaling(summaries: &[Summary], model: &str, extra: &Vars) -> Result<FitResult> {
    fit_scaling_with(summaries, model, |_| extra.clone())
}

/// As [`fit_scaling`], with bindings that may differ per dimension.
pub fn fit_scaling_with(summaries: &[Summary], model: &str, vars_at: impl Fn(usize) -> Vars) -> Result<FitResult> {
    let expr = Expr::parse(model)?;
    let mut points = Vec::new();
    for s in summaries {
        let Some(mean) = s.mean else { continue };
        let mut vars = vars_at(s.n);
        vars.insert("n".into(), s.n as f64);
        let m = expr.eval(&vars)?;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Config(format!("model {model:?} is not positive at n={}", s.n)));
        }
        points.push(FitPoint {
            n: s.n,
            mean,
            model: m,
            ratio: mean / m,
        });
    }
    if points.is_empty() {
        return Err(Error::Config("no dimension has a successful run to fit".into()));
    }
    let max = points.iter().map(|p| p.ratio).fold(f64::MIN, f64::max);
    let min = points.iter().map(|p| p.ratio).fold(f64::MAX, f64::min);
    let (slope, r_squared) = log_log_regression(&points);
    Ok(FitResult {
        model: model.to_string(),
        points,
        spread: max / min,
        slope,
        r_squared,
    })
}

fn log_log_regression(points: &[FitPoint]) -> (Option<f64>, Option<f64>) {
    let mut dims: Vec<usize> = points.iter().map(|p| p.n).collect();
    dims.dedup();
    if dims.len() < 2 {
        return (None, None);
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    (Some(slope), Some(r2))
}
