use m3rs_core::lp::{solve_lp, LpProblem, LpStatus};
use proptest::prelude::*;

#[derive(Clone, Debug)]
struct Dense {
    c: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl Dense {
    fn problem(&self) -> LpProblem {
        let mut p = LpProblem::new(self.c.clone());
        for (row, &rhs) in self.a.iter().zip(&self.b) {
            let coeffs = row.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (j, v)).collect();
            p.add_row(coeffs, rhs);
        }
        p
    }
}

fn lp() -> impl Strategy<Value = Dense> {
    (1usize..=3, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec(prop::collection::vec(-5i32..=5, n), m),
            prop::collection::vec(-5i32..=10, m),
        )
            .prop_map(|(c, a, b)| Dense {
                c: c.into_iter().map(f64::from).collect(),
                a: a.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect(),
                b: b.into_iter().map(f64::from).collect(),
            })
    })
}

fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-9 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for i in 0..n {
            if i != col {
                let f = m[i][col] / m[col][col];
                for k in col..n {
                    m[i][k] -= f * m[col][k];
                }
                r[i] -= f * r[col];
            }
        }
    }
    Some((0..n).map(|i| r[i] / m[i][i]).collect())
}

/// Best objective over the vertices of {Ax <= b, 0 <= x <= cap}.
fn best_vertex(lp: &Dense, cap: f64) -> Option<f64> {
    let n = lp.c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = lp.a.iter().cloned().zip(lp.b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        rows.push((e.clone(), 0.0));
        e[j] = 1.0;
        rows.push((e, cap));
    }
    let mut best: Option<f64> = None;
    let k = rows.len();
    let mut pick = vec![0usize; n];
    fn next(pick: &mut [usize], k: usize) -> bool {
        let n = pick.len();
        for i in (0..n).rev() {
            if pick[i] < k - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, p) in pick.iter_mut().enumerate() {
        *p = i;
    }
    loop {
        let m = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let r = pick.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve_square(m, r) {
            let feasible = rows
                .iter()
                .all(|(a, b)| a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() <= b + 1e-7);
            if feasible {
                let v: f64 = lp.c.iter().zip(&x).map(|(u, v)| u * v).sum();
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
        if !next(&mut pick, k) {
            break;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn simplex_matches_vertex_enumeration(lp in lp()) {
        let r = solve_lp(&lp.problem()).unwrap();
        match (best_vertex(&lp, 1e5), best_vertex(&lp, 1e6)) {
            (None, _) => prop_assert_eq!(r.status, LpStatus::Infeasible),
            (Some(small), Some(large)) if large > small + 1e-6 => prop_assert_eq!(r.status, LpStatus::Unbounded),
            (Some(v), _) => {
                prop_assert_eq!(r.status, LpStatus::Optimal);
                prop_assert!((r.objective - v).abs() <= 1e-6, "simplex {} vertices {}", r.objective, v);
            }
        }
    }

    #[test]
    fn optimal_results_satisfy_duality(lp in lp()) {
        let r = solve_lp(&lp.problem()).unwrap();
        prop_assume!(r.status == LpStatus::Optimal);
        let (n, m) = (lp.c.len(), lp.b.len());
        prop_assert_eq!(r.primal.len(), n);
        prop_assert_eq!(r.dual.len(), m);
        let x = &r.primal;
        let y = &r.dual;
        prop_assert!(x.iter().all(|&v| v >= -1e-9));
        prop_assert!(y.iter().all(|&v| v >= -1e-9));
        let cx: f64 = lp.c.iter().zip(x).map(|(a, b)| a * b).sum();
        let by: f64 = lp.b.iter().zip(y).map(|(a, b)| a * b).sum();
        prop_assert!((cx - r.objective).abs() <= 1e-6);
        prop_assert!((by - r.objective).abs() <= 1e-6, "primal {} dual {}", cx, by);
        for i in 0..m {
            let ax: f64 = lp.a[i].iter().zip(x).map(|(a, b)| a * b).sum();
            let slack = lp.b[i] - ax;
            prop_assert!(slack >= -1e-6);
            prop_assert!((y[i] * slack).abs() <= 1e-6);
        }
        for j in 0..n {
            let aty: f64 = (0..m).map(|i| lp.a[i][j] * y[i]).sum();
            let reduced = aty - lp.c[j];
            prop_assert!(reduced >= -1e-6);
            prop_assert!((x[j] * reduced).abs() <= 1e-6);
        }
    }
}

#[test]
fn unbounded_ray() {
    let lp = Dense { c: vec![1.0, 1.0], a: vec![vec![1.0, -1.0]], b: vec![1.0] };
    assert_eq!(solve_lp(&lp.problem()).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn infeasible_system() {
    let lp = Dense { c: vec![1.0], a: vec![vec![1.0], vec![-1.0]], b: vec![1.0, -2.0] };
    assert_eq!(solve_lp(&lp.problem()).unwrap().status, LpStatus::Infeasible);
}
