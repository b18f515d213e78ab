#![allow(dead_code)]

use m3rs_core::instgen::{default_catalog, generate, GenSpec};
use m3rs_core::{Fleet, Instance, Mode, Point, Task, TaskId};
use proptest::prelude::*;

/// Small generated instance: `modes` strongest catalog entries, short horizon
/// so windows and the horizon actually bind.
pub fn small(seed: u64, tasks: usize, agents: usize, modes: usize, hours: f64) -> Instance {
    small_with_capacity(seed, tasks, agents, modes, hours, 100.0)
}

pub fn small_with_capacity(seed: u64, tasks: usize, agents: usize, modes: usize, hours: f64, capacity: f64) -> Instance {
    let mut spec = GenSpec::new(tasks, agents, hours, seed);
    spec.mode_catalog = default_catalog().into_iter().take(modes).collect();
    spec.capacity = capacity;
    generate(&spec).expect("small spec is satisfiable")
}

pub fn fleet(count: usize, capacity: f64, speed: f64) -> Fleet {
    Fleet {
        count,
        capacity,
        speed,
        travel_energy_rate: 0.02,
        depot: Point::new(0.0, 0.0),
    }
}

/// Tasks on the x axis at integer positions with integer windows and service
/// times, speed 1: every earliest-arrival schedule is integral.
pub fn integral_instance() -> impl Strategy<Value = Instance> {
    let task = (0u32..20, 0u32..40, 5u32..40, prop::collection::vec((1u32..15, 0u32..4, 1u32..4), 1..3));
    (prop::collection::vec(task, 1..4), 1u32..5).prop_map(|(tasks, cap)| {
        let tasks = tasks
            .into_iter()
            .enumerate()
            .map(|(i, (x, a, width, modes))| Task {
                id: TaskId(i as u32),
                pos: Point::new(x as f64, 0.0),
                window_start: a as f64,
                window_end: (a + width) as f64,
                modes: modes
                    .into_iter()
                    .enumerate()
                    .map(|(k, (s, e, q))| {
                        // the first mode always fits its window
                        let s = if k == 0 { s.min(width) } else { s };
                        Mode::new(format!("m{k}"), s as f64, e as f64, q as f64 / 4.0)
                    })
                    .collect(),
            })
            .collect();
        let mut fleet = fleet(1, 2.0 + cap as f64 * 2.0, 1.0);
        fleet.travel_energy_rate = 0.1;
        // 0.025 h = 90 s
        Instance::new("int", tasks, fleet, 0.025).expect("valid integral instance")
    })
}
