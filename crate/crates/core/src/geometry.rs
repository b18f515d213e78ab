//! Euclidean travel geometry.

use crate::model::{Instance, Point};

#[inline]
pub fn distance(from: Point, to: Point) -> f64 {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    (dx * dx + dy * dy).sqrt()
}

/// Seconds needed to drive from `from` to `to` at the fleet speed.
pub fn travel_time(instance: &Instance, from: Point, to: Point) -> f64 {
    distance(from, to) / instance.fleet().speed
}

/// Battery drawn by driving from `from` to `to`.
pub fn travel_energy(instance: &Instance, from: Point, to: Point) -> f64 {
    distance(from, to) * instance.fleet().travel_energy_rate
}

/// Dense travel matrices over the depot (node 0) and every task (node `i + 1`).
#[derive(Clone, Debug)]
pub struct TravelTable {
    nodes: usize,
    time: Vec<f64>,
    energy: Vec<f64>,
}

impl TravelTable {
    pub fn new(instance: &Instance) -> Self {
        let mut points = Vec::with_capacity(instance.task_count() + 1);
        points.push(instance.fleet().depot);
        points.extend(instance.tasks().iter().map(|t| t.pos));
        let nodes = points.len();
        let mut time = vec![0.0; nodes * nodes];
        let mut energy = vec![0.0; nodes * nodes];
        for (i, &p) in points.iter().enumerate() {
            for (j, &q) in points.iter().enumerate() {
                time[i * nodes + j] = travel_time(instance, p, q);
                energy[i * nodes + j] = travel_energy(instance, p, q);
            }
        }
        TravelTable { nodes, time, energy }
    }

    /// Node index of task `i` (by position in the instance).
    #[inline]
    pub fn node(task: usize) -> usize {
        task + 1
    }

    pub const DEPOT: usize = 0;

    #[inline]
    pub fn time(&self, from: usize, to: usize) -> f64 {
        self.time[from * self.nodes + to]
    }

    #[inline]
    pub fn energy(&self, from: usize, to: usize) -> f64 {
        self.energy[from * self.nodes + to]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fleet, Instance};
    use proptest::prelude::*;

    fn empty(speed: f64, rate: f64) -> Instance {
        Instance::new(
            "g",
            vec![],
            Fleet {
                count: 1,
                capacity: 1.0,
                speed,
                travel_energy_rate: rate,
                depot: Point::default(),
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn travel_time_examples() {
        let inst = empty(0.5, 0.02);
        let o = Point::new(0.0, 0.0);
        assert_eq!(travel_time(&inst, o, o), 0.0);
        assert_eq!(travel_time(&inst, o, Point::new(3.0, 4.0)), 10.0);
        let diag = travel_time(&inst, o, Point::new(30.0, 30.0));
        assert!((diag - 1800f64.sqrt() / 0.5).abs() < 1e-12);
        assert!((diag - 84.852_813_742_385_7).abs() < 1e-9);
    }

    #[test]
    fn travel_energy_examples() {
        let inst = empty(0.5, 0.02);
        let o = Point::new(0.0, 0.0);
        assert_eq!(travel_energy(&inst, o, o), 0.0);
        assert!((travel_energy(&inst, o, Point::new(3.0, 4.0)) - 0.1).abs() < 1e-15);
        let e = travel_energy(&inst, Point::new(15.0, 15.0), o);
        assert!((e - 450f64.sqrt() * 0.02).abs() < 1e-15);
        assert!((e - 0.424_264_068_711_928_5).abs() < 1e-12);
    }

    fn pt() -> impl Strategy<Value = Point> {
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn metric_properties(a in pt(), b in pt(), c in pt()) {
            let inst = empty(0.7, 0.03);
            let t = |p, q| travel_time(&inst, p, q);
            let e = |p, q| travel_energy(&inst, p, q);
            prop_assert_eq!(t(a, b), t(b, a));
            prop_assert_eq!(e(a, b), e(b, a));
            prop_assert!(e(a, b) >= 0.0);
            prop_assert!(t(a, c) <= t(a, b) + t(b, c) + 1e-9);
            prop_assert!(e(a, c) <= e(a, b) + e(b, c) + 1e-9);
            prop_assert_eq!(t(a, a), 0.0);
            if a != b {
                prop_assert!(t(a, b) > 0.0);
            }
        }
    }
}
