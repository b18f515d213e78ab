//! Column generation over single-agent schedules.
//!
//! The restricted master LP selects at most `|A|` task-disjoint schedules
//! from a pool; its task-row duals price tasks for a single-agent route
//! search on a random task subset. Improving schedules join the pool until a
//! full-task-set pricing round finds none, then the pool is re-solved as an
//! integer set-packing problem.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use crate::column::{Column, PriceVector};
use crate::error::{Error, Result};
use crate::exact::{solve_pricing_with, PricingOutcome, SolveLimits, PRICING_BEAM};
use crate::geometry::TravelTable;
use crate::lp::{solve_lp_with, LpOptions, LpProblem, LpStatus};
use crate::model::{Instance, Route, Solution, Status, TaskId, Weights};
use crate::objective::objective_value;
use crate::schedule::Cursor;

#[derive(Clone, Debug, PartialEq)]
pub struct ColgenConfig {
    pub subset_size: usize,
    pub rmp_time_limit: f64,
    pub pricing_time_limit: f64,
    pub total_time_limit: f64,
    pub max_iterations: usize,
    pub pool_cap: usize,
    pub seed: u64,
}

impl Default for ColgenConfig {
    fn default() -> Self {
        ColgenConfig {
            subset_size: 12,
            rmp_time_limit: 60.0,
            pricing_time_limit: 60.0,
            total_time_limit: 600.0,
            max_iterations: 1000,
            pool_cap: 20,
            seed: 0,
        }
    }
}

impl ColgenConfig {
    pub fn validate(&self) -> Result<()> {
        let limits = [self.rmp_time_limit, self.pricing_time_limit, self.total_time_limit];
        if limits.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidArgument("colgen time limits must be positive".into()));
        }
        if self.subset_size == 0 || self.max_iterations == 0 || self.pool_cap == 0 {
            return Err(Error::InvalidArgument(
                "subset size, iteration cap and pool cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PoolStats {
    pub iterations: usize,
    pub columns_added: usize,
    pub pricing_rounds: usize,
    pub full_rounds: usize,
}

/// Deduplicated set of columns for one instance and weight.
#[derive(Clone, Debug)]
pub struct ColumnPool {
    weights: Weights,
    columns: Vec<Column>,
    ids: HashSet<u64>,
    pub stats: PoolStats,
}

impl ColumnPool {
    pub fn new(weights: Weights) -> Self {
        ColumnPool {
            weights,
            columns: Vec::new(),
            ids: HashSet::new(),
            stats: PoolStats::default(),
        }
    }

    /// Add a column unless one with the same id is present.
    pub fn insert(&mut self, column: Column) -> bool {
        if self.ids.insert(column.id) {
            self.columns.push(column);
            true
        } else {
            false
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }
}

/// One singleton column per task, in its best mode that fits a depot round trip.
pub fn init_pool(instance: &Instance, w: Weights) -> ColumnPool {
    let table = TravelTable::new(instance);
    init_pool_with(instance, &table, w)
}

pub(crate) fn init_pool_with(instance: &Instance, table: &TravelTable, w: Weights) -> ColumnPool {
    let mut pool = ColumnPool::new(w);
    for (t, task) in instance.tasks().iter().enumerate() {
        let best = (0..task.modes.len())
            .filter(|&m| Cursor::START.extend(instance, table, t, m).is_ok())
            .fold(None, |acc: Option<usize>, m| match acc {
                Some(b) if task.modes[b].quality >= task.modes[m].quality => Some(b),
                _ => Some(m),
            });
        if let Some(m) = best {
            if let Some(col) = Column::from_sequence(instance, table, &[(t, m)], w) {
                pool.insert(col);
            }
        }
    }
    pool
}

/// Master LP: one variable per column, a `<= 1` row per task, and `Σθ <= |A|`.
///
/// Row `i` is task `i` (instance order); the last row is the fleet row.
pub fn build_rmp(pool: &ColumnPool, instance: &Instance, _w: Weights) -> LpProblem {
    let n = instance.task_count();
    let mut lp = LpProblem::new(Vec::with_capacity(pool.len()));
    for _ in 0..n {
        lp.add_row(Vec::new(), 1.0);
    }
    let fleet_row = lp.add_row(Vec::new(), instance.fleet().count as f64);
    let mut entries = Vec::new();
    for col in pool.columns() {
        entries.clear();
        entries.extend(col.tasks.iter().map(|&t| (t, 1.0)));
        entries.push((fleet_row, 1.0));
        lp.add_column(col.cost, &entries);
    }
    lp
}

/// Exact 0/1 selection of pairwise disjoint columns, at most `|A|` of them,
/// maximizing total cost. Returns pool indices in selection order.
pub fn solve_final_integer(pool: &ColumnPool, instance: &Instance) -> Vec<usize> {
    solve_final_integer_until(pool, instance, f64::INFINITY, None).0
}

/// [`solve_final_integer`] that stops as soon as a packing reaches `target`
/// (a known upper bound) and gives up at `deadline` with the best packing
/// found so far. The flag is false only when the deadline cut the search.
pub fn solve_final_integer_until(
    pool: &ColumnPool,
    instance: &Instance,
    target: f64,
    deadline: Option<Instant>,
) -> (Vec<usize>, bool) {
    let w = pool.weights();
    let n = instance.task_count();
    let cols = pool.columns();
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by(|&a, &b| cols[b].cost.total_cmp(&cols[a].cost).then(a.cmp(&b)));

    let mut share = vec![0.0f64; n];
    for col in cols {
        for v in &col.visits {
            let t = instance.task_index(v.task).expect("pool columns reference known tasks");
            let q = instance.tasks()[t].modes[v.mode].quality;
            share[t] = share[t].max(w.visit_value(q));
        }
    }
    let mut search = PackSearch {
        cols,
        order: &order,
        share: &share,
        used: vec![false; n],
        remaining_share: share.iter().sum(),
        best_value: 0.0,
        best_pick: Vec::new(),
        pick: Vec::new(),
        target,
        deadline,
        nodes: 0,
        expired: false,
    };
    search.run(instance.fleet().count, 0, 0.0);
    (search.best_pick, !search.expired)
}

struct PackSearch<'a> {
    cols: &'a [Column],
    order: &'a [usize],
    share: &'a [f64],
    used: Vec<bool>,
    remaining_share: f64,
    best_value: f64,
    best_pick: Vec<usize>,
    pick: Vec<usize>,
    target: f64,
    deadline: Option<Instant>,
    nodes: u64,
    expired: bool,
}

impl PackSearch<'_> {
    fn run(&mut self, k: usize, start: usize, value: f64) {
        if k == 0 || self.expired || self.best_value >= self.target {
            return;
        }
        for pos in start..self.order.len() {
            self.nodes += 1;
            if self.nodes.is_multiple_of(1 << 16) && self.deadline.is_some_and(|d| Instant::now() >= d) {
                self.expired = true;
                return;
            }
            let ci = self.order[pos];
            let col = &self.cols[ci];
            if value + k as f64 * col.cost <= self.best_value {
                break;
            }
            if col.tasks.iter().any(|&t| self.used[t]) {
                continue;
            }
            let col_share: f64 = col.tasks.iter().map(|&t| self.share[t]).sum();
            let rest = self.remaining_share - col_share;
            let tail = ((k - 1) as f64 * col.cost).min(rest.max(0.0));
            let here = value + col.cost;
            if here > self.best_value {
                self.best_value = here;
                self.best_pick = self.pick.clone();
                self.best_pick.push(ci);
            }
            if k == 1 || here + tail <= self.best_value {
                continue;
            }
            for &t in &col.tasks {
                self.used[t] = true;
            }
            self.remaining_share -= col_share;
            self.pick.push(ci);
            self.run(k - 1, pos + 1, here);
            self.pick.pop();
            self.remaining_share += col_share;
            for &t in &col.tasks {
                self.used[t] = false;
            }
            if self.expired || self.best_value >= self.target {
                break;
            }
        }
    }
}

/// One row of the iteration trace.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub pool_size: usize,
    pub rmp_objective: f64,
    /// Largest reduced cost seen by pricing this iteration.
    pub best_reduced_cost: Option<f64>,
    pub subset_size: usize,
    /// Pricing covered every task (the final round of this iteration, if several ran).
    pub full_round: bool,
    /// That pricing search finished without hitting a limit.
    pub exhausted: bool,
    pub columns_added: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    NoImprovingColumn,
    MaxIterations,
    TimeLimit,
    EmptyPool,
}

#[derive(Clone, Debug)]
pub struct ColgenRun {
    pub solution: Solution,
    pub trace: Vec<IterationRecord>,
    pub pool: ColumnPool,
    /// Master LP optimum over the final pool.
    pub lp_bound: f64,
    pub termination: Termination,
    pub selected: Vec<usize>,
}

pub fn run_colgen(instance: &Instance, w: Weights, config: &ColgenConfig) -> Result<Solution> {
    Ok(run_colgen_traced(instance, w, config)?.solution)
}

pub fn run_colgen_traced(instance: &Instance, w: Weights, config: &ColgenConfig) -> Result<ColgenRun> {
    config.validate()?;
    let start = Instant::now();
    let total_deadline = start + Duration::from_secs_f64(config.total_time_limit.min(1e9));
    let table = TravelTable::new(instance);
    let n = instance.task_count();
    let ids: Vec<TaskId> = instance.tasks().iter().map(|t| t.id).collect();
    let mut pool = init_pool_with(instance, &table, w);
    let mut trace = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    if pool.is_empty() {
        let mut solution = Solution::empty(Status::Optimal);
        solution.upper_bound = Some(0.0);
        solution.compute_time = start.elapsed().as_secs_f64();
        return Ok(ColgenRun {
            solution,
            trace,
            pool,
            lp_bound: 0.0,
            termination: Termination::EmptyPool,
            selected: Vec::new(),
        });
    }

    let termination = loop {
        if Instant::now() >= total_deadline {
            break Termination::TimeLimit;
        }
        if pool.stats.iterations >= config.max_iterations {
            break Termination::MaxIterations;
        }
        pool.stats.iterations += 1;
        let iteration = pool.stats.iterations;

        let rmp_deadline = total_deadline.min(Instant::now() + Duration::from_secs_f64(config.rmp_time_limit.min(1e9)));
        let lp = match solve_lp_with(
            &build_rmp(&pool, instance, w),
            LpOptions {
                deadline: Some(rmp_deadline),
                ..LpOptions::default()
            },
        ) {
            Ok(r) if r.status == LpStatus::Optimal => r,
            Ok(r) => {
                return Err(Error::NumericalFailure(format!(
                    "restricted master reported {:?}",
                    r.status
                )))
            }
            Err(_) if Instant::now() >= total_deadline => break Termination::TimeLimit,
            Err(e) => return Err(e),
        };
        let duals = PriceVector {
            tasks: lp.dual[..n].to_vec(),
            fleet: lp.dual[n],
        };

        let k = config.subset_size.min(n);
        let mut subset: Vec<usize> = sample(&mut rng, n, k).into_vec();
        subset.sort_unstable();
        let subset_ids: Vec<TaskId> = subset.iter().map(|&i| ids[i]).collect();

        let price = |tasks: &[TaskId]| -> Result<PricingOutcome> {
            let deadline = total_deadline
                .min(Instant::now() + Duration::from_secs_f64(config.pricing_time_limit.min(1e9)));
            let limits = SolveLimits {
                max_time: config.pricing_time_limit,
                max_nodes: None,
            };
            solve_pricing_with(instance, &table, tasks, &duals, w, limits, deadline, config.pool_cap, Some(PRICING_BEAM))
        };

        let mut outcome = price(&subset_ids)?;
        pool.stats.pricing_rounds += 1;
        let mut full_round = k == n;
        if Instant::now() >= total_deadline {
            break Termination::TimeLimit;
        }
        let mut added = add_columns(&mut pool, &outcome);
        if added == 0 && !full_round {
            outcome = price(&ids)?;
            pool.stats.pricing_rounds += 1;
            full_round = true;
            if Instant::now() >= total_deadline {
                break Termination::TimeLimit;
            }
            added = add_columns(&mut pool, &outcome);
        }
        if full_round {
            pool.stats.full_rounds += 1;
        }
        pool.stats.columns_added += added;
        trace.push(IterationRecord {
            iteration,
            pool_size: pool.len(),
            rmp_objective: lp.objective,
            best_reduced_cost: outcome.best_reduced_cost,
            subset_size: if full_round { n } else { k },
            full_round,
            exhausted: outcome.exhausted,
            columns_added: added,
        });
        if added == 0 {
            // full-set pricing found nothing new
            break if outcome.exhausted && outcome.columns.is_empty() {
                Termination::Converged
            } else {
                Termination::NoImprovingColumn
            };
        }
    };

    let lp_bound = solve_lp_with(&build_rmp(&pool, instance, w), LpOptions::default())?.objective;
    let (selected, packed) = solve_final_integer_until(&pool, instance, lp_bound - 1e-9, Some(total_deadline));
    let termination = if packed { termination } else { Termination::TimeLimit };
    let routes: Vec<Route> = selected
        .iter()
        .enumerate()
        .map(|(agent, &c)| {
            let col = &pool.columns()[c];
            Route {
                agent,
                visits: col.visits.clone(),
                return_time: col.return_time,
            }
        })
        .collect();
    let mut solution = Solution {
        routes,
        objective: 0.0,
        status: Status::Feasible,
        compute_time: 0.0,
        upper_bound: None,
    };
    solution.objective = objective_value(instance, &solution, w)?;
    solution.status = match termination {
        Termination::TimeLimit => Status::TimedOut,
        Termination::Converged if solution.objective >= lp_bound - 1e-6 => Status::Optimal,
        _ => Status::Feasible,
    };
    if termination == Termination::Converged {
        solution.upper_bound = Some(lp_bound.max(solution.objective));
    }
    solution.compute_time = start.elapsed().as_secs_f64();
    Ok(ColgenRun {
        solution,
        trace,
        pool,
        lp_bound,
        termination,
        selected,
    })
}

fn add_columns(pool: &mut ColumnPool, outcome: &PricingOutcome) -> usize {
    outcome
        .columns
        .iter()
        .filter(|c| pool.insert((*c).clone()))
        .count()
}

/// Iteration trace as CSV with a header row.
pub fn trace_csv(trace: &[IterationRecord]) -> String {
    let mut out = String::from("iteration,pool_size,rmp_objective,best_reduced_cost,subset_size,full_round,columns_added\n");
    for r in trace {
        let rc = r.best_reduced_cost.map_or(String::new(), |v| format!("{v:.9}"));
        let _ = writeln!(
            out,
            "{},{},{:.9},{},{},{},{}",
            r.iteration, r.pool_size, r.rmp_objective, rc, r.subset_size, r.full_round, r.columns_added
        );
    }
    out
}
