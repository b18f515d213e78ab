mod common;

use common::small_with_capacity;
use m3rs_core::column::{Column, PriceVector};
use m3rs_core::exact::{solve_pricing, SolveLimits};
use m3rs_core::geometry::TravelTable;
use m3rs_core::{check_solution, Instance, Solution, Status, TaskId, Weights};
use proptest::prelude::*;

/// Largest reduced cost over every feasible non-empty sequence drawn from `subset`.
fn brute_best(inst: &Instance, subset: &[usize], duals: &PriceVector, w: Weights) -> Option<f64> {
    fn go(
        inst: &Instance,
        table: &TravelTable,
        subset: &[usize],
        duals: &PriceVector,
        w: Weights,
        seq: &mut Vec<(usize, usize)>,
        best: &mut Option<f64>,
    ) {
        for &t in subset {
            if seq.iter().any(|&(u, _)| u == t) {
                continue;
            }
            for m in 0..inst.tasks()[t].modes.len() {
                seq.push((t, m));
                if let Some(col) = Column::from_sequence(inst, table, seq, w) {
                    let rc = col.reduced_cost(duals);
                    *best = Some(best.map_or(rc, |b: f64| b.max(rc)));
                    go(inst, table, subset, duals, w, seq, best);
                }
                seq.pop();
            }
        }
    }
    let table = TravelTable::new(inst);
    let mut best = None;
    go(inst, &table, subset, duals, w, &mut Vec::new(), &mut best);
    best
}

fn case() -> impl Strategy<Value = (Instance, Vec<usize>, PriceVector, Weights)> {
    (any::<u64>(), 1usize..=6, prop::sample::select(vec![6.0, 100.0]), 0u32..=10).prop_flat_map(|(seed, n, cap, l)| {
        let inst = small_with_capacity(seed, n, 1, 4, 0.3, cap);
        (
            Just(inst),
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
            prop::collection::vec(0.0f64..1.2, n),
            0.0f64..2.0,
            Just(Weights::new(l as f64 / 10.0).unwrap()),
        )
            .prop_map(|(inst, subset, tasks, fleet, w)| (inst, subset, PriceVector { tasks, fleet }, w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pricing_finds_the_best_column((inst, subset, duals, w) in case()) {
        let ids: Vec<TaskId> = subset.iter().map(|&i| inst.tasks()[i].id).collect();
        let out = solve_pricing(&inst, &ids, &duals, w, SolveLimits::new(30.0).unwrap(), 5).unwrap();
        prop_assert!(out.exhausted);
        prop_assert!(out.columns.len() <= 5);
        for c in &out.columns {
            prop_assert!(c.reduced_cost(&duals) > 1e-9);
            prop_assert!(c.tasks.iter().all(|t| subset.contains(t)));
            let sol = Solution {
                routes: vec![m3rs_core::Route { agent: 0, visits: c.visits.clone(), return_time: c.return_time }],
                objective: 0.0,
                status: Status::Feasible,
                compute_time: 0.0,
                upper_bound: None,
            };
            prop_assert!(check_solution(&inst, &sol).unwrap().ok());
        }
        for pair in out.columns.windows(2) {
            prop_assert!(pair[0].reduced_cost(&duals) >= pair[1].reduced_cost(&duals) - 1e-12);
        }
        match brute_best(&inst, &subset, &duals, w) {
            Some(best) if best > 1e-9 => {
                let found = out.columns.first().map(|c| c.reduced_cost(&duals));
                prop_assert!(found.is_some_and(|f| (f - best).abs() <= 1e-9), "found {:?} best {}", found, best);
                prop_assert!(out.best_reduced_cost.is_some_and(|b| (b - best).abs() <= 1e-9));
            }
            _ => prop_assert!(out.columns.is_empty()),
        }
    }
}

#[test]
fn negative_duals_are_rejected() {
    let inst = common::small(0, 2, 1, 1, 0.3);
    let ids: Vec<TaskId> = inst.tasks().iter().map(|t| t.id).collect();
    let duals = PriceVector { tasks: vec![-1.0, 0.0], fleet: 0.0 };
    let w = Weights::new(0.5).unwrap();
    assert!(solve_pricing(&inst, &ids, &duals, w, SolveLimits::default(), 5).is_err());
}
