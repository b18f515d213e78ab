//! Exact solver for the scalarized objective, the fixed-mode baselines, and
//! the single-agent pricing problem.
//!
//! Three stages, each tried only if the previous one cannot finish:
//!
//! 1. Enumerate every feasible single-agent task set by labeling (best route
//!    per set), then pack at most `|A|` disjoint sets by branch-and-bound.
//!    Cheap whenever few task sets are feasible.
//! 2. Column generation over the full task set until no route has positive
//!    reduced cost. Its LP optimum bounds the integer optimum, and any route
//!    of a solution better than the incumbent has reduced cost within the
//!    gap, so only those routes are enumerated and packed.
//! 3. Depth-first branch-and-bound over (agent, task, mode) extensions,
//!    seeded with the best incumbent, until the budget runs out.

use std::time::{Duration, Instant};

use crate::colgen;
use crate::column::{Column, PriceVector};
use crate::error::{Error, Result};
use crate::geometry::TravelTable;
use crate::lp::{solve_lp_with, LpOptions, LpStatus};
use crate::labels::{run_labeling, BestPerSet, Bits, LabelLimits, RouteSpace, Stop, TopSets};
use crate::model::{Instance, Route, Solution, Status, Task, TaskId, Weights};
use crate::objective::objective_value;
use crate::schedule::{earliest_schedule_with, Cursor, Schedule};

/// Instances up to this size try full set enumeration first.
pub const ENUMERATION_MAX_TASKS: usize = 24;
/// Largest task count the labeling code handles.
pub const PRICING_MAX_TASKS: usize = 512;
/// Label budget for stage 1 before moving on to the LP bound.
const ENUMERATION_LABEL_CAP: usize = 300_000;
/// Label budget for any single labeling run in stage 2.
const BOUND_LABEL_CAP: usize = 8_000_000;
/// Stage 2 stops pricing once the LP value is proved within this of the
/// relaxation optimum.
const STALL_GAP: f64 = 0.01;
/// Incumbents this close to the upper bound are reported optimal.
const GAP_TOL: f64 = 1e-7;
/// Routes returned per pricing round in stage 2.
const BOUND_POOL_CAP: usize = 50;
/// Beam width of the heuristic pass tried before exact pricing.
pub(crate) const PRICING_BEAM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveLimits {
    /// Wall-clock budget in seconds.
    pub max_time: f64,
    /// Cap on search nodes (labels or branch-and-bound nodes).
    pub max_nodes: Option<u64>,
}

impl SolveLimits {
    pub fn new(max_time: f64) -> Result<Self> {
        if !(max_time > 0.0) {
            return Err(Error::InvalidArgument("max_time must be positive".into()));
        }
        Ok(SolveLimits {
            max_time,
            max_nodes: None,
        })
    }

    pub fn with_max_nodes(mut self, nodes: u64) -> Self {
        self.max_nodes = Some(nodes);
        self
    }

    pub(crate) fn deadline_from(&self, start: Instant) -> Instant {
        start + Duration::from_secs_f64(self.max_time.min(1e9))
    }
}

impl Default for SolveLimits {
    /// Twenty minutes, no node cap.
    fn default() -> Self {
        SolveLimits {
            max_time: 1200.0,
            max_nodes: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModePolicy {
    Max,
    Min,
}

/// Reduce each task to its single highest- (`Max`) or lowest-quality (`Min`) mode.
pub fn restrict_modes(instance: &Instance, policy: ModePolicy) -> Instance {
    restrict_modes_indexed(instance, policy).0
}

/// Like [`restrict_modes`], also returning the original index of the kept mode per task.
///
/// Only modes that fit inside the task's own window are candidates; a mode
/// that can never complete in time is never usable, so skipping it keeps the
/// restricted instance valid without changing what can be scheduled.
pub(crate) fn restrict_modes_indexed(instance: &Instance, policy: ModePolicy) -> (Instance, Vec<usize>) {
    let mut kept = Vec::with_capacity(instance.task_count());
    let tasks: Vec<Task> = instance
        .tasks()
        .iter()
        .map(|t| {
            let mut pick: Option<usize> = None;
            for m in (0..t.modes.len()).filter(|&m| t.mode_fits_window(m)) {
                let better = match (pick, policy) {
                    (None, _) => true,
                    (Some(p), ModePolicy::Max) => t.modes[m].quality > t.modes[p].quality,
                    (Some(p), ModePolicy::Min) => t.modes[m].quality < t.modes[p].quality,
                };
                if better {
                    pick = Some(m);
                }
            }
            let pick = pick.expect("valid instances have a fitting mode per task");
            kept.push(pick);
            Task {
                modes: vec![t.modes[pick].clone()],
                ..t.clone()
            }
        })
        .collect();
    let restricted = instance
        .with_tasks(tasks)
        .expect("kept modes fit their windows");
    (restricted, kept)
}

/// Solve the scalarized problem to optimality within `limits`.
pub fn solve_exact(instance: &Instance, w: Weights, limits: SolveLimits) -> Solution {
    let start = Instant::now();
    let deadline = limits.deadline_from(start);
    let table = TravelTable::new(instance);
    let n = instance.task_count();

    let mut sol = if n == 0 {
        Solution::empty(Status::Optimal)
    } else {
        let mut fallback = Incumbent::default();
        let mut solved = None;
        if n <= ENUMERATION_MAX_TASKS {
            match solve_by_packing(instance, &table, w, limits, deadline) {
                Ok(s) => solved = Some(s),
                Err(seed) => fallback.offer(instance, w, seed),
            }
        }
        if solved.is_none() && n <= PRICING_MAX_TASKS {
            match solve_by_bounds(instance, &table, w, limits, deadline) {
                Ok(s) => solved = Some(s),
                Err(inc) => fallback.merge(inc),
            }
        }
        match solved {
            Some(s) => s,
            None => {
                let ub = fallback.upper_bound.unwrap_or_else(|| task_caps(instance, &table, w).iter().sum());
                let mut s = solve_by_dfs(instance, &table, w, limits, deadline, fallback.routes);
                if s.status != Status::Optimal {
                    s.upper_bound = Some(s.upper_bound.map_or(ub, |b| b.min(ub)));
                    if limits.max_nodes.is_none() || Instant::now() >= deadline {
                        s.status = Status::TimedOut;
                    }
                }
                s
            }
        }
    };
    sol.objective = objective_value(instance, &sol, w).expect("solver emits known tasks");
    if sol.upper_bound.is_some_and(|ub| sol.objective >= ub - GAP_TOL) {
        // a stage ran out of time after its incumbent already met the bound
        sol.status = Status::Optimal;
    }
    if sol.status == Status::Optimal {
        sol.upper_bound = Some(sol.objective);
    } else if let Some(ub) = sol.upper_bound {
        sol.upper_bound = Some(ub.max(sol.objective));
    }
    sol.compute_time = start.elapsed().as_secs_f64();
    sol
}

/// Best routes found by a stage that could not finish, with any bound it proved.
#[derive(Default)]
struct Incumbent {
    routes: Vec<Vec<(usize, usize)>>,
    value: f64,
    upper_bound: Option<f64>,
}

impl Incumbent {
    fn offer(&mut self, instance: &Instance, w: Weights, routes: Vec<Vec<(usize, usize)>>) {
        let value = sequence_value(instance, w, &routes);
        if value > self.value {
            self.value = value;
            self.routes = routes;
        }
    }

    fn merge(&mut self, other: Incumbent) {
        if other.value > self.value {
            self.value = other.value;
            self.routes = other.routes;
        }
        if let Some(b) = other.upper_bound {
            self.upper_bound = Some(self.upper_bound.map_or(b, |a| a.min(b)));
        }
    }
}

fn sequence_value(instance: &Instance, w: Weights, routes: &[Vec<(usize, usize)>]) -> f64 {
    routes
        .iter()
        .flatten()
        .map(|&(t, m)| w.visit_value(instance.tasks()[t].modes[m].quality))
        .sum()
}

/// Stage 2: LP bound by column generation, then enumeration within the gap.
fn solve_by_bounds(
    instance: &Instance,
    table: &TravelTable,
    w: Weights,
    limits: SolveLimits,
    deadline: Instant,
) -> std::result::Result<Solution, Incumbent> {
    let n = instance.task_count();
    let agents = instance.fleet().count;
    let label_cap = limits.max_nodes.map_or(BOUND_LABEL_CAP, |m| (m as usize).min(BOUND_LABEL_CAP));
    let all: Vec<TaskId> = instance.tasks().iter().map(|t| t.id).collect();
    let mut pool = colgen::init_pool_with(instance, table, w);
    let pricing_limits = SolveLimits {
        max_time: limits.max_time,
        max_nodes: Some(label_cap as u64),
    };

    let lp_options = LpOptions {
        deadline: Some(deadline),
        ..LpOptions::default()
    };
    // (LP value, duals, best reduced cost) from the last exact pricing round,
    // and the tightest bound any exact round proved
    let mut priced: Option<(f64, PriceVector, f64)> = None;
    let mut best_ub = f64::INFINITY;
    while !pool.is_empty() && Instant::now() < deadline {
        let Ok(lp) = solve_lp_with(&colgen::build_rmp(&pool, instance, w), lp_options) else {
            break;
        };
        if lp.status != LpStatus::Optimal {
            break;
        }
        let duals = PriceVector {
            tasks: lp.dual[..n].to_vec(),
            fleet: lp.dual[n],
        };
        let Ok(out) = solve_pricing_with(instance, table, &all, &duals, w, pricing_limits, deadline, BOUND_POOL_CAP, Some(PRICING_BEAM))
        else {
            break;
        };
        if out.exhausted {
            // every route prices at most `gap` above the fleet dual, so no
            // solution beats the LP value by more than `agents * gap`
            let gap = if out.columns.is_empty() {
                0.0
            } else {
                out.best_reduced_cost.unwrap_or(0.0).max(0.0)
            };
            best_ub = best_ub.min(lp.objective + agents as f64 * (gap + REDUCED_COST_EPS));
            let stalled = agents as f64 * gap <= STALL_GAP;
            priced = Some((lp.objective, duals, gap));
            if stalled {
                break;
            }
        } else if out.columns.is_empty() {
            break;
        }
        let mut added = 0;
        for c in out.columns {
            added += pool.insert(c) as usize;
        }
        if added == 0 {
            break;
        }
    }

    let (pick, packed) = colgen::solve_final_integer_until(&pool, instance, best_ub - GAP_TOL, Some(deadline));
    let incumbent_routes: Vec<Vec<(usize, usize)>> = pick.iter().map(|&c| column_sequence(instance, &pool.columns()[c])).collect();
    let lb = sequence_value(instance, w, &incumbent_routes);
    if pool.is_empty() {
        // no task fits even alone
        return Ok(build_solution(instance, table, &[], Status::Optimal, None));
    }
    let upper_bound = best_ub.is_finite().then_some(best_ub);
    let stalled = priced.as_ref().is_some_and(|p| agents as f64 * p.2 <= STALL_GAP);
    let (z, duals, gap) = match priced {
        Some(p) if stalled && packed => p,
        _ => {
            return Err(Incumbent {
                routes: incumbent_routes,
                value: lb,
                upper_bound,
            })
        }
    };
    let slack = gap + REDUCED_COST_EPS;
    let ub = z + agents as f64 * slack;
    let tasks: Vec<usize> = (0..n).collect();
    let space = RouteSpace::new(instance, table, tasks, visit_profits(instance, w, &(0..n).collect::<Vec<_>>(), Some(&duals)));
    let labels = LabelLimits {
        deadline: Some(deadline),
        max_labels: Some(label_cap),
        beam: None,
    };
    let mut candidates = colgen::ColumnPool::new(w);
    for &c in &pick {
        candidates.insert(pool.columns()[c].clone());
    }
    let mut incumbent = Incumbent {
        routes: incumbent_routes,
        value: lb,
        upper_bound: Some(ub.min(best_ub)),
    };
    // A capped enumeration still yields routes; if packing them raises the
    // incumbent, the floor rises and the next attempt has less to list.
    loop {
        if incumbent.value >= ub - GAP_TOL {
            return Ok(build_solution(instance, table, &incumbent.routes, Status::Optimal, None));
        }
        // a route in any solution worth at least the incumbent has reduced cost >= value - ub
        let floor = duals.fleet + (incumbent.value - z) - (agents as f64 - 1.0) * slack - 1e-7;
        macro_rules! enumerate {
            ($w:literal) => {{
                let mut keep = BestPerSet::<Bits<$w>>::above(floor);
                let run = run_labeling(&space, labels, &mut keep);
                let paths: Vec<Vec<(usize, usize)>> = keep
                    .into_sorted()
                    .iter()
                    .map(|&(_, _, idx)| space.path(&run.arena, idx))
                    .collect();
                (run.stop, paths)
            }};
        }
        let (stop, paths) = match n {
            0..=64 => enumerate!(1),
            65..=128 => enumerate!(2),
            129..=256 => enumerate!(4),
            _ => enumerate!(8),
        };
        for p in &paths {
            if let Some(c) = Column::from_sequence(instance, table, p, w) {
                candidates.insert(c);
            }
        }
        let (best, packed) = colgen::solve_final_integer_until(&candidates, instance, ub - GAP_TOL, Some(deadline));
        let routes: Vec<Vec<(usize, usize)>> = best
            .iter()
            .map(|&c| column_sequence(instance, &candidates.columns()[c]))
            .collect();
        let value = sequence_value(instance, w, &routes);
        if stop == Stop::Exhausted && packed {
            return Ok(build_solution(instance, table, &routes, Status::Optimal, None));
        }
        if value <= incumbent.value + 1e-9 || stop == Stop::Deadline || !packed {
            incumbent.offer(instance, w, routes);
            return Err(incumbent);
        }
        incumbent.routes = routes;
        incumbent.value = value;
    }
}

fn column_sequence(instance: &Instance, column: &Column) -> Vec<(usize, usize)> {
    column
        .visits
        .iter()
        .map(|v| (instance.task_index(v.task).expect("columns reference known tasks"), v.mode))
        .collect()
}

fn visit_profits(instance: &Instance, w: Weights, tasks: &[usize], duals: Option<&PriceVector>) -> Vec<Vec<f64>> {
    tasks
        .iter()
        .map(|&t| {
            let price = duals.map_or(0.0, |d| d.tasks[t]);
            instance.tasks()[t]
                .modes
                .iter()
                .map(|m| w.visit_value(m.quality) - price)
                .collect()
        })
        .collect()
}

/// Optimistic value per task: best mode value if some singleton route serves it, else 0.
fn task_caps(instance: &Instance, table: &TravelTable, w: Weights) -> Vec<f64> {
    (0..instance.task_count())
        .map(|t| {
            instance.tasks()[t]
                .modes
                .iter()
                .enumerate()
                .filter(|(m, _)| Cursor::START.extend(instance, table, t, *m).is_ok())
                .map(|(_, mode)| w.visit_value(mode.quality))
                .fold(0.0, f64::max)
        })
        .collect()
}

fn route_from_sequence(instance: &Instance, table: &TravelTable, agent: usize, seq: &[(usize, usize)]) -> Route {
    let ids: Vec<(TaskId, usize)> = seq.iter().map(|&(t, m)| (instance.tasks()[t].id, m)).collect();
    match earliest_schedule_with(instance, table, agent, &ids).expect("internal sequence is well formed") {
        Schedule::Feasible(r) => r,
        Schedule::Infeasible { constraint, task } => {
            panic!("solver produced infeasible sequence ({constraint} at task {task})")
        }
    }
}

fn build_solution(
    instance: &Instance,
    table: &TravelTable,
    routes: &[Vec<(usize, usize)>],
    status: Status,
    upper_bound: Option<f64>,
) -> Solution {
    let routes = routes
        .iter()
        .filter(|r| !r.is_empty())
        .enumerate()
        .map(|(k, seq)| route_from_sequence(instance, table, k, seq))
        .collect();
    Solution {
        routes,
        objective: 0.0,
        status,
        compute_time: 0.0,
        upper_bound,
    }
}

/// Set enumeration + packing. On a label-cap overflow returns the routes of a
/// greedy incumbent built from the partial enumeration, for the DFS fallback.
fn solve_by_packing(
    instance: &Instance,
    table: &TravelTable,
    w: Weights,
    limits: SolveLimits,
    deadline: Instant,
) -> std::result::Result<Solution, Vec<Vec<(usize, usize)>>> {
    let n = instance.task_count();
    let tasks: Vec<usize> = (0..n).collect();
    let space = RouteSpace::new(instance, table, tasks.clone(), visit_profits(instance, w, &tasks, None));
    let cap = limits
        .max_nodes
        .map_or(ENUMERATION_LABEL_CAP, |m| (m as usize).min(ENUMERATION_LABEL_CAP));
    let mut visitor = BestPerSet::<Bits<1>>::new();
    let run = run_labeling(
        &space,
        LabelLimits {
            deadline: Some(deadline),
            max_labels: Some(cap),
            beam: None,
        },
        &mut visitor,
    );
    let sorted = visitor.into_sorted();
    let sets: Vec<(u64, f64)> = sorted.iter().map(|(b, v, _)| (b.0[0], *v)).collect();
    let paths: Vec<Vec<(usize, usize)>> = sorted.iter().map(|&(_, _, idx)| space.path(&run.arena, idx)).collect();
    let caps = task_caps(instance, table, w);
    let agents = instance.fleet().count;

    match run.stop {
        Stop::Exhausted => {}
        Stop::LabelCap | Stop::Truncated => {
            let pick = greedy_pack(&sets, agents);
            return Err(pick.iter().map(|&i| paths[i].clone()).collect());
        }
        Stop::Deadline => {
            let pick = greedy_pack(&sets, agents);
            let routes: Vec<_> = pick.iter().map(|&i| paths[i].clone()).collect();
            return Ok(build_solution(instance, table, &routes, Status::TimedOut, Some(caps.iter().sum())));
        }
    }

    let mut packer = Packer::new(&sets, n, agents, &caps, deadline);
    packer.run();
    let routes: Vec<_> = packer.best_pick.iter().map(|&i| paths[i].clone()).collect();
    let (status, bound) = if packer.interrupted {
        let k_bound = agents as f64 * sets.first().map_or(0.0, |s| s.1);
        (Status::TimedOut, Some(k_bound.min(caps.iter().sum())))
    } else {
        (Status::Optimal, None)
    };
    Ok(build_solution(instance, table, &routes, status, bound))
}

fn greedy_pack(sets: &[(u64, f64)], agents: usize) -> Vec<usize> {
    let mut used = 0u64;
    let mut pick = Vec::new();
    for (i, &(m, _)) in sets.iter().enumerate() {
        if pick.len() == agents {
            break;
        }
        if m & used == 0 {
            used |= m;
            pick.push(i);
        }
    }
    pick
}

const NONE: u32 = u32::MAX;

/// Branch-and-bound choosing at most `agents` disjoint sets of maximum total value.
struct Packer<'a> {
    sets: &'a [(u64, f64)],
    caps: &'a [f64],
    full: u64,
    agents: usize,
    /// best set index among subsets of each mask
    subset_best: Vec<u32>,
    best_value: f64,
    best_pick: Vec<usize>,
    deadline: Instant,
    nodes: u64,
    interrupted: bool,
}

impl<'a> Packer<'a> {
    fn new(sets: &'a [(u64, f64)], n: usize, agents: usize, caps: &'a [f64], deadline: Instant) -> Self {
        let size = 1usize << n;
        let mut subset_best = vec![NONE; size];
        // sets are sorted best-first, so the first writer per mask wins ties
        for (i, &(m, _)) in sets.iter().enumerate() {
            if subset_best[m as usize] == NONE {
                subset_best[m as usize] = i as u32;
            }
        }
        for bit in 0..n {
            let b = 1usize << bit;
            for mask in 0..size {
                if mask & b != 0 {
                    let from = subset_best[mask ^ b];
                    let cur = subset_best[mask];
                    if from != NONE && (cur == NONE || from < cur) {
                        subset_best[mask] = from;
                    }
                }
            }
        }
        Packer {
            sets,
            caps,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            agents,
            subset_best,
            best_value: 0.0,
            best_pick: Vec::new(),
            deadline,
            nodes: 0,
            interrupted: false,
        }
    }

    #[inline]
    fn best_within(&self, mask: u64) -> (f64, u32) {
        let i = self.subset_best[mask as usize];
        if i == NONE {
            (0.0, NONE)
        } else {
            (self.sets[i as usize].1, i)
        }
    }

    fn cap_sum(&self, mask: u64) -> f64 {
        let mut m = mask;
        let mut s = 0.0;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            s += self.caps[b];
            m &= m - 1;
        }
        s
    }

    fn run(&mut self) {
        let (v, i) = self.best_within(self.full);
        if i != NONE {
            self.best_value = v;
            self.best_pick = vec![i as usize];
        }
        if self.agents >= 2 {
            let mut pick = Vec::with_capacity(self.agents);
            self.search(0, self.agents, 0, 0.0, &mut pick);
        }
    }

    fn search(&mut self, used: u64, k: usize, start: usize, value: f64, pick: &mut Vec<usize>) {
        if self.interrupted {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && Instant::now() >= self.deadline {
            self.interrupted = true;
            return;
        }
        if k == 1 {
            let (v, i) = self.best_within(self.full & !used);
            if i != NONE && value + v > self.best_value {
                self.best_value = value + v;
                self.best_pick = pick.clone();
                self.best_pick.push(i as usize);
            }
            return;
        }
        for idx in start..self.sets.len() {
            let (m, f) = self.sets[idx];
            if value + k as f64 * f <= self.best_value {
                break;
            }
            if m & used != 0 {
                continue;
            }
            let rest = self.full & !(used | m);
            let (g, _) = self.best_within(rest);
            let tail = ((k - 1) as f64 * g).min(self.cap_sum(rest));
            if value + f + tail <= self.best_value {
                continue;
            }
            if g == 0.0 {
                // nothing fits beside this set
                if value + f > self.best_value {
                    self.best_value = value + f;
                    self.best_pick = pick.clone();
                    self.best_pick.push(idx);
                }
                continue;
            }
            pick.push(idx);
            self.search(used | m, k - 1, idx + 1, value + f, pick);
            pick.pop();
            if self.interrupted {
                return;
            }
        }
    }
}

/// Depth-first branch-and-bound over (agent, next task, mode) extensions.
struct Dfs<'a> {
    instance: &'a Instance,
    table: &'a TravelTable,
    w: Weights,
    caps: Vec<f64>,
    agents: usize,
    assigned: Vec<bool>,
    routes: Vec<Vec<(usize, usize)>>,
    best_value: f64,
    best_routes: Vec<Vec<(usize, usize)>>,
    deadline: Instant,
    max_nodes: Option<u64>,
    nodes: u64,
    stop: Option<Status>,
}

impl<'a> Dfs<'a> {
    fn bound(&self, cursor: &Cursor, agent: usize) -> f64 {
        let fresh_agent = agent + 1 < self.agents;
        let mut total = 0.0;
        for (t, task) in self.instance.tasks().iter().enumerate() {
            if self.assigned[t] {
                continue;
            }
            if fresh_agent {
                total += self.caps[t];
                continue;
            }
            let mut best: f64 = 0.0;
            for (m, mode) in task.modes.iter().enumerate() {
                let v = self.w.visit_value(mode.quality);
                if v > best && cursor.extend(self.instance, self.table, t, m).is_ok() {
                    best = v;
                }
            }
            total += best;
        }
        total
    }

    fn search(&mut self, agent: usize, cursor: Cursor, value: f64) {
        if self.stop.is_some() {
            return;
        }
        self.nodes += 1;
        if let Some(cap) = self.max_nodes {
            if self.nodes >= cap {
                self.stop = Some(Status::Feasible);
                return;
            }
        }
        if self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.stop = Some(Status::TimedOut);
            return;
        }
        if value > self.best_value {
            self.best_value = value;
            self.best_routes = self.routes.clone();
        }
        if value + self.bound(&cursor, agent) <= self.best_value {
            return;
        }

        let mut children = Vec::new();
        for (t, task) in self.instance.tasks().iter().enumerate() {
            if self.assigned[t] {
                continue;
            }
            for m in 0..task.modes.len() {
                if let Ok((next, _)) = cursor.extend(self.instance, self.table, t, m) {
                    let gain = self.w.visit_value(task.modes[m].quality);
                    children.push((next, t, m, gain));
                }
            }
        }
        // earliest completion first, higher value breaks ties
        children.sort_by(|a, b| {
            a.0.completion
                .total_cmp(&b.0.completion)
                .then(b.3.total_cmp(&a.3))
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        for (next, t, m, gain) in children {
            self.assigned[t] = true;
            self.routes[agent].push((t, m));
            self.search(agent, next, value + gain);
            self.routes[agent].pop();
            self.assigned[t] = false;
            if self.stop.is_some() {
                return;
            }
        }
        // next agent may start only once this one has a route
        if !self.routes[agent].is_empty() && agent + 1 < self.agents {
            self.search(agent + 1, Cursor::START, value);
        }
    }
}

fn solve_by_dfs(
    instance: &Instance,
    table: &TravelTable,
    w: Weights,
    limits: SolveLimits,
    deadline: Instant,
    seed: Vec<Vec<(usize, usize)>>,
) -> Solution {
    let agents = instance.fleet().count;
    let caps = task_caps(instance, table, w);
    let seed_value: f64 = seed
        .iter()
        .flatten()
        .map(|&(t, m)| w.visit_value(instance.tasks()[t].modes[m].quality))
        .sum();
    let mut dfs = Dfs {
        instance,
        table,
        w,
        caps,
        agents,
        assigned: vec![false; instance.task_count()],
        routes: vec![Vec::new(); agents],
        best_value: seed_value,
        best_routes: seed,
        deadline,
        max_nodes: limits.max_nodes,
        nodes: 0,
        stop: None,
    };
    let root_bound: f64 = dfs.caps.iter().sum();
    dfs.search(0, Cursor::START, 0.0);
    match dfs.stop {
        None => build_solution(instance, table, &dfs.best_routes, Status::Optimal, None),
        Some(status) => build_solution(instance, table, &dfs.best_routes, status, Some(root_bound)),
    }
}

/// Result of one pricing call.
#[derive(Clone, Debug, PartialEq)]
pub struct PricingOutcome {
    /// Columns with strictly positive reduced cost, best first.
    pub columns: Vec<Column>,
    /// The search ran to completion, so an empty list proves no improving column exists.
    pub exhausted: bool,
    /// Largest reduced cost among all non-empty routes generated.
    pub best_reduced_cost: Option<f64>,
}

/// Reduced costs at or below this are not considered improving.
pub const REDUCED_COST_EPS: f64 = 1e-9;

/// Single-agent pricing over `subset`: find up to `pool_cap` routes maximizing
/// `Σ (visit value − dual) − fleet dual`, keeping only strictly positive ones.
pub fn solve_pricing(
    instance: &Instance,
    subset: &[TaskId],
    duals: &PriceVector,
    w: Weights,
    limits: SolveLimits,
    pool_cap: usize,
) -> Result<PricingOutcome> {
    let table = TravelTable::new(instance);
    let deadline = limits.deadline_from(Instant::now());
    solve_pricing_with(instance, &table, subset, duals, w, limits, deadline, pool_cap, None)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_pricing_with(
    instance: &Instance,
    table: &TravelTable,
    subset: &[TaskId],
    duals: &PriceVector,
    w: Weights,
    limits: SolveLimits,
    deadline: Instant,
    pool_cap: usize,
    beam: Option<usize>,
) -> Result<PricingOutcome> {
    if duals.tasks.len() != instance.task_count() {
        return Err(Error::InvalidArgument("dual vector does not match task count".into()));
    }
    if duals.tasks.iter().any(|&g| g < 0.0) || duals.fleet < 0.0 {
        return Err(Error::InvalidArgument("dual prices must be non-negative".into()));
    }
    if subset.len() > PRICING_MAX_TASKS {
        return Err(Error::InvalidArgument(format!(
            "pricing supports at most {PRICING_MAX_TASKS} tasks, got {}",
            subset.len()
        )));
    }
    let mut tasks = Vec::with_capacity(subset.len());
    for &id in subset {
        let t = instance.task_index(id)?;
        if !tasks.contains(&t) {
            tasks.push(t);
        }
    }
    tasks.sort_unstable();
    // A visit that earns nothing can be skipped: the shorter route is still
    // feasible and worth at least as much. Such modes and tasks are left out.
    let mut profit = visit_profits(instance, w, &tasks, Some(duals));
    for p in profit.iter_mut().flatten() {
        if *p <= 0.0 {
            *p = f64::NEG_INFINITY;
        }
    }
    let (tasks, profit): (Vec<usize>, Vec<Vec<f64>>) = tasks
        .into_iter()
        .zip(profit)
        .filter(|(_, p)| p.iter().any(|&v| v > 0.0))
        .unzip();
    let space = RouteSpace::new(instance, table, tasks, profit);
    let exact = LabelLimits {
        deadline: Some(deadline),
        max_labels: limits.max_nodes.map(|m| m as usize),
        beam: None,
    };
    let pool_cap = pool_cap.max(1);
    macro_rules! price {
        ($w:literal) => {{
            let run_with = |labels: LabelLimits| {
                let mut top = TopSets::<Bits<$w>>::new(pool_cap, duals.fleet, REDUCED_COST_EPS);
                let run = run_labeling(&space, labels, &mut top);
                let best = top.best_gain;
                let cols: Vec<Column> = top
                    .into_sorted()
                    .iter()
                    .filter_map(|&(_, _, idx)| Column::from_sequence(instance, table, &space.path(&run.arena, idx), w))
                    .collect();
                (cols, run.stop == Stop::Exhausted, best)
            };
            let quick = beam.map(|b| run_with(LabelLimits { beam: Some(b), ..exact }));
            match quick {
                Some(found) if !found.0.is_empty() => found,
                _ => run_with(exact),
            }
        }};
    }
    let (columns, exhausted, best_reduced_cost) = match space.tasks.len() {
        0..=64 => price!(1),
        65..=128 => price!(2),
        129..=256 => price!(4),
        _ => price!(8),
    };
    let columns = columns
        .into_iter()
        .filter(|c| c.reduced_cost(duals) > REDUCED_COST_EPS)
        .collect();
    Ok(PricingOutcome {
        columns,
        exhausted,
        best_reduced_cost,
    })
}
