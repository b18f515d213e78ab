//! Independent oracles for the acceptance run.

use std::collections::BTreeSet;

use m3rs_core::lp::LpProblem;
use m3rs_core::{Instance, Point, Route, Solution, FEAS_TOL};
use rand::Rng;

/// Dense `max c·x, Ax <= b, x >= 0`.
#[derive(Clone, Debug)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl DenseLp {
    pub fn random(rng: &mut impl Rng) -> Self {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=4);
        let mut int = |lo: i32, hi: i32| f64::from(rng.gen_range(lo..=hi));
        DenseLp {
            c: (0..n).map(|_| int(-5, 5)).collect(),
            a: (0..m).map(|_| (0..n).map(|_| int(-5, 5)).collect()).collect(),
            b: (0..m).map(|_| int(-5, 10)).collect(),
        }
    }

    pub fn problem(&self) -> LpProblem {
        let mut p = LpProblem::new(self.c.clone());
        for (row, &rhs) in self.a.iter().zip(&self.b) {
            let coeffs = row.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (j, v)).collect();
            p.add_row(coeffs, rhs);
        }
        p
    }

    /// Best objective over the vertices of the region cut by `0 <= x <= cap`.
    pub fn best_vertex(&self, cap: f64) -> Option<f64> {
        let n = self.c.len();
        let mut rows: Vec<(Vec<f64>, f64)> = self.a.iter().cloned().zip(self.b.iter().copied()).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = -1.0;
            rows.push((e.clone(), 0.0));
            e[j] = 1.0;
            rows.push((e, cap));
        }
        let mut best: Option<f64> = None;
        for pick in combinations(rows.len(), n) {
            let m = pick.iter().map(|&i| rows[i].0.clone()).collect();
            let r = pick.iter().map(|&i| rows[i].1).collect();
            let Some(x) = solve_square(m, r) else { continue };
            let inside = rows.iter().all(|(a, b)| dot(a, &x) <= b + 1e-7);
            if inside {
                let v = dot(&self.c, &x);
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
        best
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, n, &mut Vec::new(), &mut out);
    out
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

fn dist(p: Point, q: Point) -> f64 {
    ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt()
}

/// Violated constraint tags, straight from the constraint definitions.
pub fn violated(inst: &Instance, sol: &Solution) -> BTreeSet<&'static str> {
    let fleet = inst.fleet();
    let mut out = BTreeSet::new();
    if sol.routes.len() > fleet.count {
        out.insert("g");
    }
    let mut agents = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for r in &sol.routes {
        if r.agent >= fleet.count || !agents.insert(r.agent) {
            out.insert("g");
        }
        if r.visits.is_empty() {
            continue;
        }
        let mut at = fleet.depot;
        let mut free: Option<f64> = Some(0.0);
        let mut battery = 0.0;
        for v in &r.visits {
            let t = inst.task(v.task).unwrap();
            if !seen.insert(v.task) {
                out.insert("a");
            }
            let leg = dist(at, t.pos);
            battery += leg * fleet.travel_energy_rate;
            if v.arrival < 0.0 || free.is_some_and(|f| v.arrival + FEAS_TOL < f + leg / fleet.speed) {
                out.insert("d");
            }
            if v.arrival + FEAS_TOL < t.window_start {
                out.insert("e");
            }
            free = match t.modes.get(v.mode) {
                Some(m) => {
                    battery += m.energy;
                    if v.arrival + m.service_time > t.window_end + FEAS_TOL {
                        out.insert("e");
                    }
                    Some(v.arrival + m.service_time)
                }
                None => {
                    out.insert("b");
                    None
                }
            };
            at = t.pos;
        }
        let home = dist(at, fleet.depot);
        battery += home * fleet.travel_energy_rate;
        if battery > fleet.capacity + FEAS_TOL {
            out.insert("c");
        }
        let early = free.is_some_and(|f| r.return_time + FEAS_TOL < f + home / fleet.speed);
        if early || r.return_time > inst.horizon() + FEAS_TOL {
            out.insert("f");
        }
    }
    out
}

/// Perturb one arrival, mode, route element, return time or agent index.
pub fn mutate(sol: &mut Solution, rng: &mut impl Rng) -> String {
    const DELTAS: [f64; 10] = [-500.0, -30.0, -1.0, -1e-3, -1e-8, 1e-8, 1e-3, 1.0, 30.0, 500.0];
    let spots: Vec<(usize, usize)> = sol
        .routes
        .iter()
        .enumerate()
        .flat_map(|(r, route)| (0..route.visits.len()).map(move |v| (r, v)))
        .collect();
    let n_routes = sol.routes.len();
    let kind = rng.gen_range(0..8);
    if spots.is_empty() || ((kind == 2 || kind == 3) && n_routes < 2) {
        let agent = rng.gen_range(0..4);
        sol.routes.push(Route::empty(agent));
        return format!("add empty route for agent {agent}");
    }
    let (r, v) = spots[rng.gen_range(0..spots.len())];
    let delta = DELTAS[rng.gen_range(0..DELTAS.len())];
    match kind {
        0 => {
            sol.routes[r].visits[v].arrival += delta;
            format!("shift arrival ({r},{v}) by {delta}")
        }
        1 => {
            let mode = rng.gen_range(0..6);
            sol.routes[r].visits[v].mode = mode;
            format!("set mode ({r},{v}) to {mode}")
        }
        2 => {
            let visit = sol.routes[r].visits[v].clone();
            sol.routes[(r + 1) % n_routes].visits.push(visit);
            format!("copy ({r},{v}) to the next route")
        }
        3 => {
            let visit = sol.routes[r].visits.remove(v);
            sol.routes[(r + 1) % n_routes].visits.push(visit);
            format!("move ({r},{v}) to the next route")
        }
        4 => {
            let len = sol.routes[r].visits.len();
            let u = (v + 1) % len;
            let (a, b) = (sol.routes[r].visits[v].task, sol.routes[r].visits[u].task);
            sol.routes[r].visits[v].task = b;
            sol.routes[r].visits[u].task = a;
            format!("swap tasks ({r},{v}) and ({r},{u})")
        }
        5 => {
            sol.routes[r].return_time += delta;
            format!("shift return {r} by {delta}")
        }
        6 => {
            let agent = rng.gen_range(0..4);
            sol.routes[r].agent = agent;
            format!("set agent of route {r} to {agent}")
        }
        _ => {
            sol.routes[r].visits.remove(v);
            format!("drop ({r},{v})")
        }
    }
}
