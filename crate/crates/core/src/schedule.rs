//! Earliest-arrival scheduling of a fixed (task, mode) sequence.
//!
//! The objective never rewards lateness or earliness, and agents may wait, so
//! serving each visit as early as possible keeps every option open for the
//! rest of the route. Solvers therefore only reason about sequences.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::TravelTable;
use crate::model::{Instance, Route, TaskId, Visit, FEAS_TOL};
use crate::validate::Constraint;

/// Partial single-agent route state after serving some prefix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Cursor {
    pub node: usize,
    pub completion: f64,
    pub energy: f64,
}

impl Cursor {
    pub const START: Cursor = Cursor {
        node: TravelTable::DEPOT,
        completion: 0.0,
        energy: 0.0,
    };

    /// Append task `task` (instance position) in mode `mode`.
    ///
    /// Returns the new cursor and the arrival time, or the first constraint the
    /// extension breaks. A successful extension can still return to the depot
    /// within the horizon and the energy budget.
    #[inline]
    pub fn extend(
        &self,
        instance: &Instance,
        table: &TravelTable,
        task: usize,
        mode: usize,
    ) -> std::result::Result<(Cursor, f64), Constraint> {
        let t = &instance.tasks()[task];
        let m = &t.modes[mode];
        let node = TravelTable::node(task);
        let arrival = t.window_start.max(self.completion + table.time(self.node, node));
        let completion = arrival + m.service_time;
        if completion > t.window_end + FEAS_TOL {
            return Err(Constraint::Window);
        }
        let energy = self.energy + table.energy(self.node, node) + m.energy;
        if energy + table.energy(node, TravelTable::DEPOT) > instance.fleet().capacity + FEAS_TOL {
            return Err(Constraint::Capacity);
        }
        if completion + table.time(node, TravelTable::DEPOT) > instance.horizon() + FEAS_TOL {
            return Err(Constraint::Horizon);
        }
        Ok((
            Cursor {
                node,
                completion,
                energy,
            },
            arrival,
        ))
    }

    pub fn return_time(&self, table: &TravelTable) -> f64 {
        if self.node == TravelTable::DEPOT {
            0.0
        } else {
            self.completion + table.time(self.node, TravelTable::DEPOT)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    Feasible(Route),
    /// No arrival times make the sequence feasible; `constraint` is the first
    /// one broken while propagating forward, at `task`.
    Infeasible { constraint: Constraint, task: TaskId },
}

impl Schedule {
    pub fn route(self) -> Option<Route> {
        match self {
            Schedule::Feasible(r) => Some(r),
            Schedule::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Schedule::Feasible(_))
    }
}

/// Forward-propagate earliest arrivals along `sequence` for agent `agent`.
pub fn earliest_schedule(
    instance: &Instance,
    agent: usize,
    sequence: &[(TaskId, usize)],
) -> Result<Schedule> {
    let table = TravelTable::new(instance);
    earliest_schedule_with(instance, &table, agent, sequence)
}

pub(crate) fn earliest_schedule_with(
    instance: &Instance,
    table: &TravelTable,
    agent: usize,
    sequence: &[(TaskId, usize)],
) -> Result<Schedule> {
    let mut seen = HashSet::with_capacity(sequence.len());
    let mut resolved = Vec::with_capacity(sequence.len());
    for &(id, mode) in sequence {
        let idx = instance.task_index(id)?;
        if !seen.insert(id) {
            return Err(Error::DuplicateTask(id));
        }
        if mode >= instance.tasks()[idx].modes.len() {
            return Err(Error::InvalidArgument(format!(
                "task {id} has no mode index {mode}"
            )));
        }
        resolved.push((idx, mode));
    }
    let mut cursor = Cursor::START;
    let mut visits = Vec::with_capacity(resolved.len());
    for (idx, mode) in resolved {
        match cursor.extend(instance, table, idx, mode) {
            Ok((next, arrival)) => {
                visits.push(Visit {
                    task: instance.tasks()[idx].id,
                    mode,
                    arrival,
                });
                cursor = next;
            }
            Err(constraint) => {
                return Ok(Schedule::Infeasible {
                    constraint,
                    task: instance.tasks()[idx].id,
                })
            }
        }
    }
    Ok(Schedule::Feasible(Route {
        agent,
        visits,
        return_time: cursor.return_time(table),
    }))
}
