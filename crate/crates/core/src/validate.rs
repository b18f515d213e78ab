//! Independent feasibility checking of a complete solution.

use std::collections::HashSet;
use std::fmt;

use crate::error::Result;
use crate::geometry::{travel_energy, travel_time};
use crate::model::{Instance, Solution, TaskId, FEAS_TOL};

/// Constraint classes a solution can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// (a) a task is serviced more than once fleet-wide.
    Assignment,
    /// (b) a visit does not select exactly one valid mode.
    Mode,
    /// (c) service plus travel energy exceeds the agent budget.
    Capacity,
    /// (d) an arrival precedes the previous completion plus travel.
    Timing,
    /// (e) service starts before the window opens or ends after it closes.
    Window,
    /// (f) the agent is not back at the depot by the horizon.
    Horizon,
    /// Route/agent bookkeeping: too many routes or a bad agent index.
    Fleet,
}

impl Constraint {
    pub fn tag(self) -> &'static str {
        match self {
            Constraint::Assignment => "a",
            Constraint::Mode => "b",
            Constraint::Capacity => "c",
            Constraint::Timing => "d",
            Constraint::Window => "e",
            Constraint::Horizon => "f",
            Constraint::Fleet => "g",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constraint::Assignment => "assignment",
            Constraint::Mode => "mode",
            Constraint::Capacity => "capacity",
            Constraint::Timing => "timing",
            Constraint::Window => "window",
            Constraint::Horizon => "horizon",
            Constraint::Fleet => "fleet",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.tag(), self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    pub agent: Option<usize>,
    pub task: Option<TaskId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constraint)?;
        if let Some(a) = self.agent {
            write!(f, " agent {a}")?;
        }
        if let Some(t) = self.task {
            write!(f, " task {t}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn constraints(&self) -> HashSet<Constraint> {
        self.violations.iter().map(|v| v.constraint).collect()
    }
}

/// Check every route of `solution` against the instance and collect all violations.
///
/// Unknown task ids are a precondition failure and returned as an error.
pub fn check_solution(instance: &Instance, solution: &Solution) -> Result<FeasibilityReport> {
    for v in solution.visits() {
        instance.task_index(v.task)?;
    }
    let fleet = instance.fleet();
    let horizon = instance.horizon();
    let mut out = Vec::new();
    let mut push = |constraint, agent, task, detail: String| {
        out.push(Violation {
            constraint,
            agent,
            task,
            detail,
        })
    };

    if solution.routes.len() > fleet.count {
        push(
            Constraint::Fleet,
            None,
            None,
            format!("{} routes for {} agents", solution.routes.len(), fleet.count),
        );
    }
    let mut agents = HashSet::new();
    let mut served = HashSet::new();
    for route in &solution.routes {
        let agent = Some(route.agent);
        if route.agent >= fleet.count {
            push(Constraint::Fleet, agent, None, "agent index out of range".into());
        }
        if !agents.insert(route.agent) {
            push(Constraint::Fleet, agent, None, "agent has more than one route".into());
        }
        if route.visits.is_empty() {
            continue;
        }

        let mut energy = 0.0;
        let mut prev_pos = fleet.depot;
        let mut prev_done: Option<f64> = Some(0.0);
        for v in &route.visits {
            let task = instance.task(v.task)?;
            let tid = Some(v.task);
            if !served.insert(v.task) {
                push(Constraint::Assignment, agent, tid, "task serviced more than once".into());
            }
            let leg_time = travel_time(instance, prev_pos, task.pos);
            energy += travel_energy(instance, prev_pos, task.pos);
            if !v.arrival.is_finite() || v.arrival < 0.0 {
                push(Constraint::Timing, agent, tid, format!("arrival {} is not a valid time", v.arrival));
            }
            if let Some(done) = prev_done {
                if v.arrival < done + leg_time - FEAS_TOL {
                    push(
                        Constraint::Timing,
                        agent,
                        tid,
                        format!("arrival {:.6} before earliest possible {:.6}", v.arrival, done + leg_time),
                    );
                }
            }
            if v.arrival < task.window_start - FEAS_TOL {
                push(
                    Constraint::Window,
                    agent,
                    tid,
                    format!("arrival {:.6} before window opens at {}", v.arrival, task.window_start),
                );
            }
            match task.modes.get(v.mode) {
                None => {
                    push(Constraint::Mode, agent, tid, format!("no mode with index {}", v.mode));
                    prev_done = None;
                }
                Some(mode) => {
                    energy += mode.energy;
                    let done = v.arrival + mode.service_time;
                    if done > task.window_end + FEAS_TOL {
                        push(
                            Constraint::Window,
                            agent,
                            tid,
                            format!("completion {:.6} after window closes at {}", done, task.window_end),
                        );
                    }
                    prev_done = Some(done);
                }
            }
            prev_pos = task.pos;
        }
        energy += travel_energy(instance, prev_pos, fleet.depot);
        if energy > fleet.capacity + FEAS_TOL {
            push(
                Constraint::Capacity,
                agent,
                None,
                format!("energy {:.6} exceeds capacity {}", energy, fleet.capacity),
            );
        }
        if let Some(done) = prev_done {
            let earliest_return = done + travel_time(instance, prev_pos, fleet.depot);
            if route.return_time < earliest_return - FEAS_TOL {
                push(
                    Constraint::Horizon,
                    agent,
                    None,
                    format!("return {:.6} before earliest possible {:.6}", route.return_time, earliest_return),
                );
            }
        }
        if !(route.return_time <= horizon + FEAS_TOL) {
            push(
                Constraint::Horizon,
                agent,
                None,
                format!("return {:.6} after horizon {:.6}", route.return_time, horizon),
            );
        }
    }
    Ok(FeasibilityReport { violations: out })
}
