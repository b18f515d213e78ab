//! Seeded synthetic instances.
//!
//! Tasks are scattered uniformly over a square area with the depot in the
//! middle. Each task gets a random non-empty subset of the mode catalog and a
//! window whose center is uniform over the horizon. Coordinates are rounded to
//! centimeters and windows to whole seconds (start up, end down) so files stay
//! short and round-trip exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Fleet, Instance, Mode, Point, Task, TaskId};

pub const MAX_REDRAWS: usize = 1000;

/// Disinfection dose catalog, strongest first.
pub fn default_catalog() -> Vec<Mode> {
    vec![
        Mode::new("D_99.9999", 240.0, 4.0, 1.0),
        Mode::new("D_99.99", 160.0, 2.67, 0.667),
        Mode::new("D_99", 80.0, 1.33, 0.333),
        Mode::new("D_90", 40.0, 0.67, 0.167),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub n_tasks: usize,
    pub n_agents: usize,
    pub horizon_hours: f64,
    pub area_side: f64,
    pub seed: u64,
    pub mode_catalog: Vec<Mode>,
    pub window_width_range: (f64, f64),
    pub speed: f64,
    pub capacity: f64,
    pub travel_energy_rate: f64,
}

impl GenSpec {
    pub fn new(n_tasks: usize, n_agents: usize, horizon_hours: f64, seed: u64) -> Self {
        GenSpec {
            n_tasks,
            n_agents,
            horizon_hours,
            seed,
            ..GenSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.n_tasks == 0 {
            return bad("n_tasks must be at least 1");
        }
        if self.n_agents == 0 {
            return bad("n_agents must be at least 1");
        }
        if !(self.horizon_hours > 0.0 && self.horizon_hours.is_finite()) {
            return bad("horizon_hours must be positive");
        }
        if !(self.area_side >= 0.0 && self.area_side.is_finite()) {
            return bad("area_side must be non-negative");
        }
        if self.mode_catalog.is_empty() || self.mode_catalog.len() > 16 {
            return bad("mode catalog must hold between 1 and 16 modes");
        }
        let (lo, hi) = self.window_width_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad("window width range must satisfy 0 < min <= max");
        }
        let longest = self.mode_catalog.iter().map(|m| m.service_time).fold(0.0, f64::max);
        if lo < longest {
            return Err(Error::InvalidArgument(format!(
                "window widths must be at least the longest service time ({longest} s)"
            )));
        }
        Ok(())
    }
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            n_tasks: 20,
            n_agents: 2,
            horizon_hours: 0.86,
            area_side: 30.0,
            seed: 0,
            mode_catalog: default_catalog(),
            window_width_range: (300.0, 900.0),
            speed: 0.5,
            capacity: 100.0,
            travel_energy_rate: 0.02,
        }
    }
}

pub fn instance_name(n_tasks: usize, n_agents: usize, horizon_hours: f64) -> String {
    format!("{n_tasks}-{n_agents}-{horizon_hours}")
}

fn round_cm(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let horizon = spec.horizon_hours * 3600.0;
    let catalog = &spec.mode_catalog;
    let subsets = (1u32 << catalog.len()) - 1;
    let (w_lo, w_hi) = spec.window_width_range;

    let mut tasks = Vec::with_capacity(spec.n_tasks);
    for i in 0..spec.n_tasks {
        let x = round_cm(rng.gen_range(0.0..=spec.area_side));
        let y = round_cm(rng.gen_range(0.0..=spec.area_side));
        let mask = rng.gen_range(1..=subsets);
        let mut modes: Vec<Mode> = (0..catalog.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| catalog[b].clone())
            .collect();
        modes.sort_by(|a, b| b.quality.total_cmp(&a.quality));
        let shortest = modes.iter().map(|m| m.service_time).fold(f64::INFINITY, f64::min);

        let mut window = None;
        for _ in 0..MAX_REDRAWS {
            let center = rng.gen_range(0.0..=horizon);
            let width = rng.gen_range(w_lo..=w_hi);
            let a = (center - width / 2.0).max(0.0).ceil();
            let b = (center + width / 2.0).min(horizon).floor();
            if a < b && a + shortest <= b {
                window = Some((a, b));
                break;
            }
        }
        let Some((a, b)) = window else {
            return Err(Error::InfeasibleSpec(format!(
                "no window admitting any mode for task {i} after {MAX_REDRAWS} draws"
            )));
        };
        tasks.push(Task {
            id: TaskId(i as u32),
            pos: Point::new(x, y),
            window_start: a,
            window_end: b,
            modes,
        });
    }
    let half = spec.area_side / 2.0;
    let fleet = Fleet {
        count: spec.n_agents,
        capacity: spec.capacity,
        speed: spec.speed,
        travel_energy_rate: spec.travel_energy_rate,
        depot: Point::new(half, half),
    };
    Instance::new(
        instance_name(spec.n_tasks, spec.n_agents, spec.horizon_hours),
        tasks,
        fleet,
        spec.horizon_hours,
    )
}
