//! JSON file formats for instances and solutions.
//!
//! Instance files carry the horizon in hours and windows in seconds. Solution
//! files name modes by label, so they stay readable without the instance.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Fleet, Instance, Mode, Point, Route, Solution, Status, Task, TaskId, Visit};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    horizon_hours: f64,
    fleet: FleetFile,
    tasks: Vec<TaskFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FleetFile {
    count: usize,
    capacity: f64,
    speed: f64,
    travel_energy_rate: f64,
    depot: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskFile {
    id: TaskId,
    pos: [f64; 2],
    window_s: [f64; 2],
    modes: Vec<ModeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeFile {
    label: String,
    service_s: f64,
    energy: f64,
    quality: f64,
}

pub fn instance_to_json(instance: &Instance) -> String {
    let f = instance.fleet();
    let file = InstanceFile {
        name: instance.name().to_string(),
        horizon_hours: instance.horizon_hours(),
        fleet: FleetFile {
            count: f.count,
            capacity: f.capacity,
            speed: f.speed,
            travel_energy_rate: f.travel_energy_rate,
            depot: [f.depot.x, f.depot.y],
        },
        tasks: instance
            .tasks()
            .iter()
            .map(|t| TaskFile {
                id: t.id,
                pos: [t.pos.x, t.pos.y],
                window_s: [t.window_start, t.window_end],
                modes: t
                    .modes
                    .iter()
                    .map(|m| ModeFile {
                        label: m.label.clone(),
                        service_s: m.service_time,
                        energy: m.energy,
                        quality: m.quality,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let tasks = file
        .tasks
        .into_iter()
        .map(|t| Task {
            id: t.id,
            pos: Point::new(t.pos[0], t.pos[1]),
            window_start: t.window_s[0],
            window_end: t.window_s[1],
            modes: t
                .modes
                .into_iter()
                .map(|m| Mode::new(m.label, m.service_s, m.energy, m.quality))
                .collect(),
        })
        .collect();
    let fleet = Fleet {
        count: file.fleet.count,
        capacity: file.fleet.capacity,
        speed: file.fleet.speed,
        travel_energy_rate: file.fleet.travel_energy_rate,
        depot: Point::new(file.fleet.depot[0], file.fleet.depot[1]),
    };
    Instance::new(file.name, tasks, fleet, file.horizon_hours)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    fs::write(path, instance_to_json(instance))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionJson {
    instance: String,
    lambda: f64,
    method: String,
    status: Status,
    objective: f64,
    compute_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper_bound: Option<f64>,
    routes: Vec<RouteJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RouteJson {
    agent: usize,
    visits: Vec<VisitJson>,
    return_s: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VisitJson {
    task: TaskId,
    mode_label: String,
    arrival_s: f64,
}

/// A solution together with the run metadata stored beside it.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFile {
    pub instance: String,
    pub lambda: f64,
    pub method: String,
    pub solution: Solution,
}

pub fn solution_to_json(instance: &Instance, file: &SolutionFile) -> Result<String> {
    let s = &file.solution;
    let mut routes = Vec::with_capacity(s.routes.len());
    for r in &s.routes {
        let mut visits = Vec::with_capacity(r.visits.len());
        for v in &r.visits {
            visits.push(VisitJson {
                task: v.task,
                mode_label: instance.mode(v.task, v.mode)?.label.clone(),
                arrival_s: v.arrival,
            });
        }
        routes.push(RouteJson {
            agent: r.agent,
            visits,
            return_s: r.return_time,
        });
    }
    let json = SolutionJson {
        instance: file.instance.clone(),
        lambda: file.lambda,
        method: file.method.clone(),
        status: s.status,
        objective: s.objective,
        compute_time_s: s.compute_time,
        upper_bound: s.upper_bound,
        routes,
    };
    let mut out = serde_json::to_string_pretty(&json)?;
    out.push('\n');
    Ok(out)
}

/// Parse a solution file, resolving mode labels against `instance`.
pub fn solution_from_json(instance: &Instance, text: &str) -> Result<SolutionFile> {
    let json: SolutionJson = serde_json::from_str(text)?;
    let mut routes = Vec::with_capacity(json.routes.len());
    for r in json.routes {
        let mut visits = Vec::with_capacity(r.visits.len());
        for v in r.visits {
            let task = instance.task(v.task)?;
            let mode = task
                .modes
                .iter()
                .position(|m| m.label == v.mode_label)
                .ok_or_else(|| {
                    Error::Format(format!("task {} has no mode labelled {:?}", v.task, v.mode_label))
                })?;
            visits.push(Visit {
                task: v.task,
                mode,
                arrival: v.arrival_s,
            });
        }
        routes.push(Route {
            agent: r.agent,
            visits,
            return_time: r.return_s,
        });
    }
    Ok(SolutionFile {
        instance: json.instance,
        lambda: json.lambda,
        method: json.method,
        solution: Solution {
            routes,
            objective: json.objective,
            status: json.status,
            compute_time: json.compute_time_s,
            upper_bound: json.upper_bound,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate, GenSpec};

    #[test]
    fn instance_round_trip() {
        let inst = generate(&GenSpec::new(12, 2, 0.46, 5)).unwrap();
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(instance_to_json(&back), text);
    }

    #[test]
    fn schema_field_names() {
        let inst = generate(&GenSpec::new(1, 1, 0.5, 0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&instance_to_json(&inst)).unwrap();
        assert_eq!(v["horizon_hours"], 0.5);
        assert!(v["fleet"]["depot"].is_array());
        let t = &v["tasks"][0];
        assert!(t["window_s"].is_array() && t["pos"].is_array());
        assert!(t["modes"][0]["service_s"].is_number());
    }

    #[test]
    fn malformed_instance_rejected() {
        assert!(matches!(instance_from_json("{"), Err(Error::Json(_))));
        assert!(matches!(
            instance_from_json(r#"{"name":"x","horizon_hours":1,"fleet":{"count":1,"capacity":1,"speed":1,"travel_energy_rate":0,"depot":[0,0]},"tasks":[{"id":0,"pos":[0,0],"window_s":[5,1],"modes":[{"label":"a","service_s":1,"energy":0,"quality":1}]}]}"#),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn solution_round_trip() {
        let inst = generate(&GenSpec::new(6, 2, 0.46, 2)).unwrap();
        let sol = crate::exact::solve_exact(&inst, crate::model::Weights::new(0.5).unwrap(), Default::default());
        let file = SolutionFile {
            instance: inst.name().into(),
            lambda: 0.5,
            method: "exact".into(),
            solution: sol,
        };
        let text = solution_to_json(&inst, &file).unwrap();
        assert_eq!(solution_from_json(&inst, &text).unwrap(), file);
    }

    #[test]
    fn unknown_label_is_format_error() {
        let inst = generate(&GenSpec::new(2, 1, 0.46, 2)).unwrap();
        let text = r#"{"instance":"x","lambda":0.5,"method":"exact","status":"Feasible","objective":0,"compute_time_s":0,
            "routes":[{"agent":0,"visits":[{"task":0,"mode_label":"nope","arrival_s":0}],"return_s":0}]}"#;
        assert!(matches!(solution_from_json(&inst, text), Err(Error::Format(_))));
    }
}
