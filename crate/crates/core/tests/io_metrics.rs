mod common;

use common::small;
use m3rs_core::exact::{restrict_modes, solve_exact, ModePolicy, SolveLimits};
use m3rs_core::instgen::{generate, GenSpec};
use m3rs_core::io::{instance_from_json, instance_to_json, solution_from_json, solution_to_json, SolutionFile};
use m3rs_core::metrics::{pareto_sweep, to_csv, MetricReport, Parallelism, CSV_HEADER};
use m3rs_core::{check_solution, solve, Method, SolveOptions, Weights};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn instance_json_round_trips(seed in any::<u64>(), n in 1usize..=30, a in 1usize..=4, h in 0.1f64..2.0, side in 0.0f64..100.0) {
        let mut spec = GenSpec::new(n, a, (h * 100.0).round() / 100.0, seed);
        spec.area_side = side;
        let inst = generate(&spec).unwrap();
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_to_json(&back), text);
    }

    #[test]
    fn solution_json_round_trips(seed in any::<u64>(), n in 1usize..=6, l in 0u32..=10) {
        let inst = small(seed, n, 2, 4, 0.3);
        let w = Weights::new(l as f64 / 10.0).unwrap();
        let sol = solve_exact(&inst, w, SolveLimits::new(30.0).unwrap());
        let file = SolutionFile { instance: inst.name().into(), lambda: w.lambda(), method: "exact".into(), solution: sol };
        let text = solution_to_json(&inst, &file).unwrap();
        let back = solution_from_json(&inst, &text).unwrap();
        prop_assert_eq!(&back, &file);
    }

    #[test]
    fn metric_ranges_and_identity(seed in any::<u64>(), n in 1usize..=6, l in 0u32..=10) {
        let inst = small(seed, n, 2, 4, 0.3);
        let w = Weights::new(l as f64 / 10.0).unwrap();
        let sol = solve_exact(&inst, w, SolveLimits::new(30.0).unwrap());
        let r = MetricReport::new(&inst, "exact", w, &sol).unwrap();
        for v in [r.sr, r.dq, r.msi] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let lhs = r.msi * n as f64 * (1.0 + inst.max_quality());
        prop_assert!((lhs - r.visited as f64 * (1.0 + r.dq)).abs() <= 1e-9);
    }

    #[test]
    fn max_mode_restriction_keeps_each_tasks_best_mode(seed in any::<u64>(), n in 1usize..=6) {
        let inst = small(seed, n, 2, 4, 0.3);
        let restricted = restrict_modes(&inst, ModePolicy::Max);
        for (t, r) in inst.tasks().iter().zip(restricted.tasks()) {
            prop_assert_eq!(r.modes.len(), 1);
            let best = (0..t.modes.len()).filter(|&m| t.mode_fits_window(m)).map(|m| t.modes[m].quality).fold(0.0, f64::max);
            prop_assert_eq!(r.modes[0].quality, best);
        }
    }

    #[test]
    fn rsf_max_dq_is_the_strongest_quality(seed in any::<u64>(), n in 1usize..=6, l in 0u32..=10) {
        let inst = small(seed, n, 2, 4, 0.3);
        let w = Weights::new(l as f64 / 10.0).unwrap();
        let sol = solve(&inst, Method::RsfMax, w, &SolveOptions::default()).unwrap();
        prop_assert!(check_solution(&inst, &sol).unwrap().ok());
        let r = MetricReport::new(&inst, "rsf-max", w, &sol).unwrap();
        if r.sr > 0.0 {
            // an average of equal values, exact up to rounding
            prop_assert!((r.dq - inst.max_quality()).abs() <= 1e-12, "{} vs {}", r.dq, inst.max_quality());
        }
    }
}

#[test]
fn sweep_rows_follow_the_grid() {
    let inst = small(3, 5, 2, 4, 0.3);
    let grid = [0.0, 0.5, 1.0];
    let rows = pareto_sweep(&inst, Method::Exact, &grid, &SolveOptions::default(), Parallelism::Auto).unwrap();
    assert_eq!(rows.iter().map(|r| r.lambda).collect::<Vec<_>>(), grid);
    let csv = to_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 4);
}

#[test]
fn parallel_and_sequential_sweeps_agree() {
    let inst = small(4, 6, 2, 4, 0.3);
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let opts = SolveOptions::default();
    let strip = |mut rows: Vec<MetricReport>| {
        rows.iter_mut().for_each(|r| r.compute_time = 0.0);
        rows
    };
    let a = strip(pareto_sweep(&inst, Method::Exact, &grid, &opts, Parallelism::Auto).unwrap());
    let b = strip(pareto_sweep(&inst, Method::Exact, &grid, &opts, Parallelism::Sequential).unwrap());
    assert_eq!(a, b);
}
