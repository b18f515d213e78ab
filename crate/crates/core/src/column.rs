//! Single-agent schedules used as master-problem columns.

use crate::geometry::TravelTable;
use crate::model::{Instance, Visit, Weights};
use crate::schedule::{earliest_schedule_with, Schedule};

/// Dual prices handed to pricing: one per task (by instance position) plus
/// the fleet-size row.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceVector {
    pub tasks: Vec<f64>,
    pub fleet: f64,
}

impl PriceVector {
    pub fn zeros(n: usize) -> Self {
        PriceVector {
            tasks: vec![0.0; n],
            fleet: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub visits: Vec<Visit>,
    pub return_time: f64,
    /// Covered tasks by instance position, ascending.
    pub tasks: Vec<usize>,
    pub cost: f64,
    pub id: u64,
}

impl Column {
    /// Schedule `sequence` (instance positions and mode indices) at earliest
    /// arrivals. `None` if the sequence is infeasible.
    pub fn from_sequence(
        instance: &Instance,
        table: &TravelTable,
        sequence: &[(usize, usize)],
        w: Weights,
    ) -> Option<Column> {
        let ids: Vec<_> = sequence
            .iter()
            .map(|&(t, m)| (instance.tasks()[t].id, m))
            .collect();
        let route = match earliest_schedule_with(instance, table, 0, &ids).ok()? {
            Schedule::Feasible(r) => r,
            Schedule::Infeasible { .. } => return None,
        };
        let quality: f64 = sequence
            .iter()
            .map(|&(t, m)| instance.tasks()[t].modes[m].quality)
            .sum();
        let cost = w.lambda() * sequence.len() as f64 + (1.0 - w.lambda()) * quality;
        let mut tasks: Vec<usize> = sequence.iter().map(|&(t, _)| t).collect();
        tasks.sort_unstable();
        Some(Column {
            id: column_id(instance, sequence),
            visits: route.visits,
            return_time: route.return_time,
            tasks,
            cost,
        })
    }

    pub fn covers(&self, task: usize) -> bool {
        self.tasks.binary_search(&task).is_ok()
    }

    /// 0/1 coverage over all instance tasks.
    pub fn coverage(&self, n_tasks: usize) -> Vec<u8> {
        let mut out = vec![0; n_tasks];
        for &t in &self.tasks {
            out[t] = 1;
        }
        out
    }

    pub fn reduced_cost(&self, duals: &PriceVector) -> f64 {
        self.cost - self.tasks.iter().map(|&t| duals.tasks[t]).sum::<f64>() - duals.fleet
    }

    pub fn is_disjoint(&self, other: &Column) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.tasks.len() && j < other.tasks.len() {
            match self.tasks[i].cmp(&other.tasks[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

/// FNV-1a over the (task id, mode) sequence.
fn column_id(instance: &Instance, sequence: &[(usize, usize)]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    for &(t, m) in sequence {
        eat(instance.tasks()[t].id.0 as u64);
        eat(m as u64);
    }
    eat(sequence.len() as u64);
    h
}
