use crate::error::Result;
use crate::model::{Instance, Solution, Weights};

/// Sum of mode qualities over every visit.
pub fn quality_sum(instance: &Instance, solution: &Solution) -> Result<f64> {
    solution
        .visits()
        .map(|v| instance.mode(v.task, v.mode).map(|m| m.quality))
        .sum()
}

/// Scalarized objective `lambda * visited + (1 - lambda) * quality_sum`.
///
/// Arrival times play no role.
pub fn objective_value(instance: &Instance, solution: &Solution, w: Weights) -> Result<f64> {
    let count = solution.visited_count() as f64;
    let quality = quality_sum(instance, solution)?;
    Ok(w.lambda() * count + (1.0 - w.lambda()) * quality)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fleet, Mode, Point, Route, Status, Task, TaskId, Visit};

    fn inst() -> Instance {
        let modes = vec![
            Mode::new("D_99.9999", 240.0, 4.0, 1.0),
            Mode::new("D_99", 80.0, 1.33, 0.333),
            Mode::new("D_90", 40.0, 0.67, 0.167),
        ];
        let tasks = (0..3)
            .map(|i| Task {
                id: TaskId(i),
                pos: Point::new(i as f64, 0.0),
                window_start: 0.0,
                window_end: 3000.0,
                modes: modes.clone(),
            })
            .collect();
        Instance::new(
            "o",
            tasks,
            Fleet {
                count: 2,
                capacity: 100.0,
                speed: 0.5,
                travel_energy_rate: 0.02,
                depot: Point::default(),
            },
            1.0,
        )
        .unwrap()
    }

    fn sol(visits: &[(u32, usize)]) -> Solution {
        Solution {
            routes: vec![Route {
                agent: 0,
                visits: visits
                    .iter()
                    .map(|&(t, m)| Visit {
                        task: TaskId(t),
                        mode: m,
                        arrival: 0.0,
                    })
                    .collect(),
                return_time: 0.0,
            }],
            ..Solution::empty(Status::Feasible)
        }
    }

    #[test]
    fn lambda_one_counts_tasks() {
        let v = objective_value(&inst(), &sol(&[(0, 0), (1, 1), (2, 2)]), Weights::new(1.0).unwrap()).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn lambda_zero_sums_quality() {
        let v = objective_value(&inst(), &sol(&[(0, 0), (1, 1)]), Weights::new(0.0).unwrap()).unwrap();
        assert_eq!(v, 1.333);
    }

    #[test]
    fn lambda_half() {
        let v = objective_value(&inst(), &sol(&[(0, 0), (1, 2)]), Weights::new(0.5).unwrap()).unwrap();
        assert!((v - 1.5835).abs() < 1e-12);
    }

    #[test]
    fn arrival_times_do_not_matter() {
        let w = Weights::new(0.3).unwrap();
        let a = sol(&[(0, 0), (1, 2)]);
        let mut b = a.clone();
        b.routes[0].visits[1].arrival = 1234.5;
        assert_eq!(
            objective_value(&inst(), &a, w).unwrap(),
            objective_value(&inst(), &b, w).unwrap()
        );
    }
}
