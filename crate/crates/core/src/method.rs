//! Named solution methods behind one entry point.

use std::fmt;
use std::str::FromStr;

use crate::colgen::{run_colgen, ColgenConfig};
use crate::error::{Error, Result};
use crate::exact::{restrict_modes_indexed, solve_exact, ModePolicy, SolveLimits};
use crate::model::{Instance, Solution, Weights};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Colgen,
    /// Exact solve using only the instance's strongest mode; tasks without it are skipped.
    RsfMax,
    /// Exact solve with every task fixed to its weakest mode.
    RsfMin,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Exact, Method::Colgen, Method::RsfMax, Method::RsfMin];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Colgen => "colgen",
            Method::RsfMax => "rsf-max",
            Method::RsfMin => "rsf-min",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveOptions {
    pub limits: SolveLimits,
    pub colgen: ColgenConfig,
}

pub fn solve(instance: &Instance, method: Method, w: Weights, options: &SolveOptions) -> Result<Solution> {
    match method {
        Method::Exact => Ok(solve_exact(instance, w, options.limits)),
        Method::Colgen => run_colgen(instance, w, &options.colgen),
        Method::RsfMax => Ok(solve_fixed(instance, ModePolicy::Max, w, options.limits)),
        Method::RsfMin => Ok(solve_fixed(instance, ModePolicy::Min, w, options.limits)),
    }
}

fn solve_fixed(instance: &Instance, policy: ModePolicy, w: Weights, limits: SolveLimits) -> Solution {
    let (mut restricted, kept) = restrict_modes_indexed(instance, policy);
    if policy == ModePolicy::Max {
        // the max variant runs the strongest dose only; tasks that cannot take it sit out
        let top = instance.max_quality();
        let tasks = restricted
            .tasks()
            .iter()
            .filter(|t| t.modes[0].quality == top)
            .cloned()
            .collect();
        restricted = restricted.with_tasks(tasks).expect("subset of a valid instance");
    }
    let mut sol = solve_exact(&restricted, w, limits);
    for route in &mut sol.routes {
        for v in &mut route.visits {
            let t = instance.task_index(v.task).expect("restriction keeps task ids");
            v.mode = kept[t];
        }
    }
    sol
}
