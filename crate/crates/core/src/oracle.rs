//! Brute-force optimum for tiny instances.
//!
//! Every way of splitting a task subset into at most `|A|` ordered sequences,
//! with every mode choice, is scheduled at earliest arrivals and scored. No
//! bounding; only infeasible prefixes are cut, which is safe because a
//! sequence whose prefix misses a window, the battery or the horizon cannot be
//! repaired by appending visits.

use crate::error::{Error, Result};
use crate::model::{Instance, Route, Solution, Status, TaskId, Weights};
use crate::objective::objective_value;
use crate::schedule::{earliest_schedule, Schedule};

pub const ORACLE_MAX_TASKS: usize = 8;

pub fn enumerate_optimal(instance: &Instance, w: Weights) -> Result<(f64, Solution)> {
    let n = instance.task_count();
    if n > ORACLE_MAX_TASKS {
        return Err(Error::TooLarge {
            tasks: n,
            limit: ORACLE_MAX_TASKS,
        });
    }
    let mut search = Search {
        instance,
        w,
        used: vec![false; n],
        done: Vec::new(),
        current: Vec::new(),
        best: (0.0, Vec::new()),
    };
    search.extend()?;

    let (_, routes) = search.best;
    let mut solution = Solution {
        routes,
        objective: 0.0,
        status: Status::Optimal,
        compute_time: 0.0,
        upper_bound: None,
    };
    solution.objective = objective_value(instance, &solution, w)?;
    solution.upper_bound = Some(solution.objective);
    Ok((solution.objective, solution))
}

struct Search<'a> {
    instance: &'a Instance,
    w: Weights,
    used: Vec<bool>,
    /// Closed routes, one per agent so far.
    done: Vec<Route>,
    /// Sequence being built for the next agent.
    current: Vec<(TaskId, usize)>,
    best: (f64, Vec<Route>),
}

impl Search<'_> {
    fn value(&self) -> f64 {
        let mut v = 0.0;
        for r in &self.done {
            for visit in &r.visits {
                v += self.visit_value(visit.task, visit.mode);
            }
        }
        for &(t, m) in &self.current {
            v += self.visit_value(t, m);
        }
        v
    }

    fn visit_value(&self, t: TaskId, m: usize) -> f64 {
        let q = self.instance.mode(t, m).expect("enumerated pairs exist").quality;
        self.w.visit_value(q)
    }

    fn extend(&mut self) -> Result<()> {
        let agent = self.done.len();
        let route = match earliest_schedule(self.instance, agent, &self.current)? {
            Schedule::Feasible(r) => r,
            Schedule::Infeasible { .. } => return Ok(()),
        };
        let v = self.value();
        if v > self.best.0 + 1e-12 {
            let mut routes = self.done.clone();
            if !route.visits.is_empty() {
                routes.push(route.clone());
            }
            self.best = (v, routes);
        }

        for t in 0..self.used.len() {
            if self.used[t] {
                continue;
            }
            let task = &self.instance.tasks()[t];
            for m in 0..task.modes.len() {
                self.used[t] = true;
                self.current.push((task.id, m));
                self.extend()?;
                self.current.pop();
                self.used[t] = false;
            }
        }

        // close this agent's route and start the next one
        if !self.current.is_empty() && agent + 1 < self.instance.fleet().count {
            let saved = std::mem::take(&mut self.current);
            self.done.push(route);
            self.extend()?;
            self.done.pop();
            self.current = saved;
        }
        Ok(())
    }
}
