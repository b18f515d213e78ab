//! Domain types shared by every solver.
//!
//! Times are seconds, distances meters, energies in abstract battery units.
//! An [`Instance`] is validated on construction and immutable afterwards;
//! variants (relaxed windows, different fleet size, restricted modes) are
//! built as new instances.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every feasibility comparison (seconds and energy units).
pub const FEAS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// One way of executing a task.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub label: String,
    pub service_time: f64,
    pub energy: f64,
    pub quality: f64,
}

impl Mode {
    pub fn new(label: impl Into<String>, service_time: f64, energy: f64, quality: f64) -> Self {
        Mode {
            label: label.into(),
            service_time,
            energy,
            quality,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.service_time.is_finite() && self.service_time >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "mode {}: service time must be non-negative",
                self.label
            )));
        }
        if !(self.energy.is_finite() && self.energy >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "mode {}: energy must be non-negative",
                self.label
            )));
        }
        if !(self.quality > 0.0 && self.quality <= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "mode {}: quality must lie in (0, 1]",
                self.label
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: TaskId,
    pub pos: Point,
    pub window_start: f64,
    pub window_end: f64,
    pub modes: Vec<Mode>,
}

impl Task {
    /// Whether mode `m` fits inside the window when started at `window_start`.
    pub fn mode_fits_window(&self, m: usize) -> bool {
        self.window_start + self.modes[m].service_time <= self.window_end + FEAS_TOL
    }

    pub fn max_quality(&self) -> f64 {
        self.modes.iter().map(|m| m.quality).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fleet {
    pub count: usize,
    pub capacity: f64,
    pub speed: f64,
    pub travel_energy_rate: f64,
    pub depot: Point,
}

#[derive(Clone, Debug)]
pub struct Instance {
    name: String,
    tasks: Vec<Task>,
    fleet: Fleet,
    horizon_hours: f64,
    index: HashMap<TaskId, usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.tasks == other.tasks
            && self.fleet == other.fleet
            && self.horizon_hours == other.horizon_hours
    }
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        tasks: Vec<Task>,
        fleet: Fleet,
        horizon_hours: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !(horizon_hours.is_finite() && horizon_hours > 0.0) {
            return Err(Error::InvalidInstance("horizon must be positive".into()));
        }
        if fleet.count == 0 {
            return Err(Error::InvalidInstance("fleet needs at least one agent".into()));
        }
        if !(fleet.capacity.is_finite() && fleet.capacity > 0.0) {
            return Err(Error::InvalidInstance("capacity must be positive".into()));
        }
        if !(fleet.speed.is_finite() && fleet.speed > 0.0) {
            return Err(Error::InvalidInstance("speed must be positive".into()));
        }
        if !(fleet.travel_energy_rate.is_finite() && fleet.travel_energy_rate >= 0.0) {
            return Err(Error::InvalidInstance(
                "travel energy rate must be non-negative".into(),
            ));
        }
        if !(fleet.depot.x.is_finite() && fleet.depot.y.is_finite()) {
            return Err(Error::InvalidInstance("depot coordinates must be finite".into()));
        }
        let horizon = horizon_hours * 3600.0;
        let mut index = HashMap::with_capacity(tasks.len());
        for (i, t) in tasks.iter().enumerate() {
            if index.insert(t.id, i).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate task id {}", t.id)));
            }
            if !(t.pos.x.is_finite() && t.pos.y.is_finite()) {
                return Err(Error::InvalidInstance(format!(
                    "task {}: coordinates must be finite",
                    t.id
                )));
            }
            if !(t.window_start >= 0.0 && t.window_start < t.window_end) {
                return Err(Error::InvalidInstance(format!(
                    "task {}: window [{}, {}] is empty or negative",
                    t.id, t.window_start, t.window_end
                )));
            }
            if t.window_end > horizon + FEAS_TOL {
                return Err(Error::InvalidInstance(format!(
                    "task {}: window ends after the horizon",
                    t.id
                )));
            }
            if t.modes.is_empty() {
                return Err(Error::InvalidInstance(format!("task {}: no modes", t.id)));
            }
            for m in &t.modes {
                m.validate()?;
            }
            if !(0..t.modes.len()).any(|m| t.mode_fits_window(m)) {
                return Err(Error::InvalidInstance(format!(
                    "task {}: no mode fits inside its window",
                    t.id
                )));
            }
        }
        Ok(Instance {
            name,
            tasks,
            fleet,
            horizon_hours,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn fleet(&self) -> &Fleet {
        &self.fleet
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon_hours
    }

    /// Mission horizon in seconds.
    pub fn horizon(&self) -> f64 {
        self.horizon_hours * 3600.0
    }

    pub fn task_index(&self, id: TaskId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownTaskId(id))
    }

    pub fn task(&self, id: TaskId) -> Result<&Task> {
        Ok(&self.tasks[self.task_index(id)?])
    }

    pub fn mode(&self, id: TaskId, mode: usize) -> Result<&Mode> {
        let task = self.task(id)?;
        task.modes.get(mode).ok_or_else(|| {
            Error::InvalidArgument(format!("task {id} has no mode index {mode}"))
        })
    }

    /// Largest quality over every mode of every task (0 for an empty instance).
    pub fn max_quality(&self) -> f64 {
        self.tasks.iter().map(Task::max_quality).fold(0.0, f64::max)
    }

    pub fn with_name(&self, name: impl Into<String>) -> Instance {
        let mut out = self.clone();
        out.name = name.into();
        out
    }

    /// Same instance with a different fleet size.
    pub fn with_fleet_count(&self, count: usize) -> Result<Instance> {
        let mut fleet = self.fleet.clone();
        fleet.count = count;
        Instance::new(self.name.clone(), self.tasks.clone(), fleet, self.horizon_hours)
    }

    /// Same instance with every window opening at time zero.
    pub fn with_relaxed_starts(&self) -> Instance {
        let tasks = self
            .tasks
            .iter()
            .map(|t| Task {
                window_start: 0.0,
                ..t.clone()
            })
            .collect();
        Instance::new(self.name.clone(), tasks, self.fleet.clone(), self.horizon_hours)
            .expect("relaxing window starts keeps an instance valid")
    }

    pub(crate) fn with_tasks(&self, tasks: Vec<Task>) -> Result<Instance> {
        Instance::new(self.name.clone(), tasks, self.fleet.clone(), self.horizon_hours)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Visit {
    pub task: TaskId,
    pub mode: usize,
    pub arrival: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub agent: usize,
    pub visits: Vec<Visit>,
    pub return_time: f64,
}

impl Route {
    pub fn empty(agent: usize) -> Self {
        Route {
            agent,
            visits: Vec::new(),
            return_time: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    TimedOut,
}

impl Status {
    /// Single-letter code used in metric tables.
    pub fn code(self) -> &'static str {
        match self {
            Status::Optimal => "O",
            Status::Feasible => "F",
            Status::Infeasible => "I",
            Status::TimedOut => "T",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub objective: f64,
    pub status: Status,
    /// Wall-clock seconds spent by the solver.
    pub compute_time: f64,
    /// Proven upper bound on the optimum, when the solver has one.
    pub upper_bound: Option<f64>,
}

impl Solution {
    pub fn empty(status: Status) -> Self {
        Solution {
            routes: Vec::new(),
            objective: 0.0,
            status,
            compute_time: 0.0,
            upper_bound: None,
        }
    }

    pub fn visits(&self) -> impl Iterator<Item = &Visit> {
        self.routes.iter().flat_map(|r| r.visits.iter())
    }

    pub fn visited_count(&self) -> usize {
        self.routes.iter().map(|r| r.visits.len()).sum()
    }
}

/// Scalarization weight: `lambda` on the task count, `1 - lambda` on the quality sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    lambda: f64,
}

impl Weights {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        Ok(Weights { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }

    /// Contribution of one visit performed at the given quality.
    #[inline]
    pub fn visit_value(self, quality: f64) -> f64 {
        self.lambda + (1.0 - self.lambda) * quality
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(id: u32, a: f64, b: f64, sigma: f64) -> Task {
        Task {
            id: TaskId(id),
            pos: Point::new(1.0, 1.0),
            window_start: a,
            window_end: b,
            modes: vec![Mode::new("m", sigma, 1.0, 0.5)],
        }
    }

    fn fleet() -> Fleet {
        Fleet {
            count: 1,
            capacity: 10.0,
            speed: 0.5,
            travel_energy_rate: 0.02,
            depot: Point::default(),
        }
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = Instance::new("x", vec![task(1, 0.0, 100.0, 10.0), task(1, 0.0, 100.0, 10.0)], fleet(), 1.0);
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn rejects_window_past_horizon() {
        let err = Instance::new("x", vec![task(1, 0.0, 4000.0, 10.0)], fleet(), 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_task_without_fitting_mode() {
        let err = Instance::new("x", vec![task(1, 0.0, 5.0, 10.0)], fleet(), 1.0);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_bad_quality_and_empty_window() {
        let mut t = task(1, 0.0, 100.0, 10.0);
        t.modes[0].quality = 0.0;
        assert!(Instance::new("x", vec![t], fleet(), 1.0).is_err());
        assert!(Instance::new("x", vec![task(1, 50.0, 50.0, 0.0)], fleet(), 1.0).is_err());
    }

    #[test]
    fn weights_range() {
        assert!(Weights::new(-0.1).is_err());
        assert!(Weights::new(1.5).is_err());
        let w = Weights::new(0.25).unwrap();
        assert_eq!(w.visit_value(1.0), 1.0);
        assert_eq!(Weights::new(1.0).unwrap().visit_value(0.3), 1.0);
    }

    #[test]
    fn relaxed_starts_zero_windows() {
        let inst = Instance::new("x", vec![task(1, 50.0, 100.0, 10.0)], fleet(), 1.0).unwrap();
        let relaxed = inst.with_relaxed_starts();
        assert_eq!(relaxed.tasks()[0].window_start, 0.0);
        assert_eq!(relaxed.tasks()[0].window_end, 100.0);
    }
}
