//! Evaluation metrics and λ sweeps.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::method::{solve, Method, SolveOptions};
use crate::model::{Instance, Solution, Status, TaskId, Weights};
use crate::objective::quality_sum;

/// Fraction of tasks visited.
pub fn success_rate(instance: &Instance, solution: &Solution) -> f64 {
    match instance.task_count() {
        0 => 0.0,
        n => solution.visited_count() as f64 / n as f64,
    }
}

/// Mean quality over visited tasks; 0 when nothing is visited.
pub fn dosage_quality(instance: &Instance, solution: &Solution) -> Result<f64> {
    match solution.visited_count() {
        0 => Ok(0.0),
        k => Ok(quality_sum(instance, solution)? / k as f64),
    }
}

/// `(visited + Σ quality) / (|T| (1 + p_max))`, with `p_max` the best quality in the instance.
pub fn mission_success_index(instance: &Instance, solution: &Solution) -> Result<f64> {
    let n = instance.task_count();
    if n == 0 {
        return Ok(0.0);
    }
    let num = solution.visited_count() as f64 + quality_sum(instance, solution)?;
    Ok(num / (n as f64 * (1.0 + instance.max_quality())))
}

/// Mean overrun past each task's window end over an execution log.
pub fn avg_lateness(instance: &Instance, log: &[(TaskId, f64)]) -> Result<f64> {
    if log.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for &(id, done) in log {
        let task = instance.task(id)?;
        total += (done - task.window_end).max(0.0);
    }
    Ok(total / log.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub instance: String,
    pub method: String,
    pub lambda: f64,
    pub sr: f64,
    pub dq: f64,
    pub msi: f64,
    pub compute_time: f64,
    pub status: Status,
    pub visited: usize,
    pub quality_sum: f64,
    pub objective: f64,
}

impl MetricReport {
    pub fn new(instance: &Instance, method: &str, w: Weights, solution: &Solution) -> Result<Self> {
        Ok(MetricReport {
            instance: instance.name().to_string(),
            method: method.to_string(),
            lambda: w.lambda(),
            sr: success_rate(instance, solution),
            dq: dosage_quality(instance, solution)?,
            msi: mission_success_index(instance, solution)?,
            compute_time: solution.compute_time,
            status: solution.status,
            visited: solution.visited_count(),
            quality_sum: quality_sum(instance, solution)?,
            objective: solution.objective,
        })
    }

    /// Row for a solve that produced nothing usable.
    fn failed(instance: &Instance, method: &str, lambda: f64) -> Self {
        MetricReport {
            instance: instance.name().to_string(),
            method: method.to_string(),
            lambda,
            sr: 0.0,
            dq: 0.0,
            msi: 0.0,
            compute_time: 0.0,
            status: Status::Infeasible,
            visited: 0,
            quality_sum: 0.0,
            objective: 0.0,
        }
    }
}

pub const CSV_HEADER: &str = "instance,method,lambda,sr,dq,msi,ct_seconds,status";

pub fn csv_row(r: &MetricReport) -> String {
    format!(
        "{},{},{},{:.6},{:.6},{:.6},{:.3},{}",
        r.instance,
        r.method,
        r.lambda,
        r.sr,
        r.dq,
        r.msi,
        r.compute_time,
        r.status.code()
    )
}

/// Header plus one line per report, in the given order.
pub fn to_csv(reports: &[MetricReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", csv_row(r));
    }
    out
}

/// How sweep rows are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    /// Use the global rayon pool when the `parallel` feature is on.
    #[default]
    Auto,
    /// A dedicated pool of this many threads.
    Threads(usize),
    Sequential,
}

/// Solve once per λ and report metrics, rows in grid order. Solver failures
/// become rows with status `Infeasible` instead of aborting.
pub fn pareto_sweep(
    instance: &Instance,
    method: Method,
    lambda_grid: &[f64],
    options: &SolveOptions,
    parallelism: Parallelism,
) -> Result<Vec<MetricReport>> {
    let weights = lambda_grid
        .iter()
        .map(|&l| Weights::new(l))
        .collect::<Result<Vec<_>>>()?;
    let row = |w: &Weights| -> MetricReport {
        solve(instance, method, *w, options)
            .and_then(|s| MetricReport::new(instance, method.name(), *w, &s))
            .unwrap_or_else(|_| MetricReport::failed(instance, method.name(), w.lambda()))
    };
    let mut rows = map_rows(&weights, row, parallelism)?;
    rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(rows)
}

/// Apply `f` to every item, possibly in parallel, preserving order.
pub fn map_rows<T, R, F>(items: &[T], f: F, parallelism: Parallelism) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match parallelism {
            Parallelism::Sequential => Ok(items.iter().map(f).collect()),
            Parallelism::Auto => Ok(items.par_iter().map(f).collect()),
            Parallelism::Threads(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
                Ok(pool.install(|| items.par_iter().map(f).collect()))
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        if let Parallelism::Threads(0) = parallelism {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        Ok(items.iter().map(f).collect())
    }
}
