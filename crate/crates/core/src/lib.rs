//! Multi-robot, multi-mode routing and scheduling.
//!
//! Agents leave a depot, visit tasks inside their time windows, pick one
//! service mode per visit, and return before the mission horizon on a single
//! battery. The objective trades visited-task count against total service
//! quality through a weight `λ`.
//!
//! Solvers: [`exact::solve_exact`] (certified optimum on small instances),
//! [`colgen::run_colgen`] (column generation), and fixed-mode baselines via
//! [`method::solve`]. [`oracle::enumerate_optimal`] is a brute-force check for
//! tiny instances.

pub mod colgen;
pub mod column;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod instgen;
pub mod io;
mod labels;
pub mod lp;
pub mod method;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod schedule;
pub mod validate;

pub use error::{Error, Result};
pub use method::{solve, Method, SolveOptions};
pub use model::{
    Fleet, Instance, Mode, Point, Route, Solution, Status, Task, TaskId, Visit, Weights, FEAS_TOL,
};
pub use validate::{check_solution, Constraint, FeasibilityReport};
