//! Dense two-phase primal simplex for `max c·x  s.t.  A x <= b, x >= 0`.
//!
//! Sized for restricted master problems: a few dozen rows, a few thousand
//! columns. Pivoting uses Dantzig's rule and switches to Bland's rule once a
//! run of degenerate pivots is detected. Dual values are read off the slack
//! reduced costs of the final tableau.

use std::time::Instant;

use crate::error::{Error, Result};

const COST_EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-9;
const STALL_LIMIT: usize = 50;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        LpProblem {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Add the row `Σ coeffs[k].1 · x[coeffs[k].0] <= rhs`; returns its index.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    /// Add a variable with objective `cost` and the given `(row, coefficient)` entries.
    pub fn add_column(&mut self, cost: f64, entries: &[(usize, f64)]) -> usize {
        let var = self.objective.len();
        self.objective.push(cost);
        for &(row, coef) in entries {
            self.rows[row].push((var, coef));
        }
        var
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Dense row `i`.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars()];
        for &(j, a) in &self.rows[i] {
            out[j] += a;
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("objective coefficients must be finite".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !self.rhs[i].is_finite() {
                return Err(Error::InvalidArgument(format!("row {i}: rhs must be finite")));
            }
            for &(j, a) in row {
                if j >= n {
                    return Err(Error::InvalidArgument(format!(
                        "row {i} references variable {j} of {n}"
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidArgument(format!("row {i}: non-finite coefficient")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// One value per variable (empty unless optimal).
    pub primal: Vec<f64>,
    /// One non-negative value per row (empty unless optimal).
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LpOptions {
    pub max_iterations: Option<usize>,
    pub deadline: Option<Instant>,
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpResult> {
    solve_lp_with(problem, LpOptions::default())
}

pub fn solve_lp_with(problem: &LpProblem, options: LpOptions) -> Result<LpResult> {
    problem.validate()?;
    let mut tab = Tableau::new(problem);
    let cap = options
        .max_iterations
        .unwrap_or(50_000 + 50 * (problem.num_rows() + problem.num_vars()));

    if tab.needs_phase_one() {
        tab.start_phase_one();
        match tab.run(cap, options.deadline)? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(Error::NumericalFailure("phase one reported unbounded".into()))
            }
        }
        if tab.objective_value() < -1e-7 {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                primal: Vec::new(),
                dual: Vec::new(),
                objective: 0.0,
                iterations: tab.iterations,
            });
        }
        tab.drive_out_artificial();
    }
    tab.start_phase_two(&problem.objective);
    let status = match tab.run(cap, options.deadline)? {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    if status == LpStatus::Unbounded {
        return Ok(LpResult {
            status,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: f64::INFINITY,
            iterations: tab.iterations,
        });
    }
    let primal = tab.primal();
    let dual = tab.dual();
    let objective = problem
        .objective
        .iter()
        .zip(&primal)
        .map(|(c, x)| c * x)
        .sum();
    Ok(LpResult {
        status,
        primal,
        dual,
        objective,
        iterations: tab.iterations,
    })
}

enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    n: usize,
    /// structural + slack + artificial columns
    cols: usize,
    width: usize,
    /// row-major, `m` rows of `width` (= cols + 1, last is rhs)
    a: Vec<f64>,
    /// reduced costs `z_j - c_j`, last entry is the objective value
    obj: Vec<f64>,
    basis: Vec<usize>,
    blocked: Vec<bool>,
    iterations: usize,
}

impl Tableau {
    fn new(p: &LpProblem) -> Self {
        let m = p.num_rows();
        let n = p.num_vars();
        let cols = n + m + 1;
        let width = cols + 1;
        let mut a = vec![0.0; m * width];
        for (i, row) in p.rows.iter().enumerate() {
            for &(j, v) in row {
                a[i * width + j] += v;
            }
            a[i * width + n + i] = 1.0;
            a[i * width + cols] = p.rhs[i];
        }
        let mut blocked = vec![false; cols];
        blocked[n + m] = true;
        Tableau {
            m,
            n,
            cols,
            width,
            a,
            obj: vec![0.0; width],
            basis: (n..n + m).collect(),
            blocked,
            iterations: 0,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width + self.cols]
    }

    fn artificial(&self) -> usize {
        self.n + self.m
    }

    fn needs_phase_one(&self) -> bool {
        (0..self.m).any(|i| self.rhs(i) < 0.0)
    }

    fn objective_value(&self) -> f64 {
        self.obj[self.cols]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        for j in 0..self.width {
            let mut z = 0.0;
            for i in 0..self.m {
                let cb = costs[self.basis[i]];
                if cb != 0.0 {
                    z += cb * self.at(i, j);
                }
            }
            self.obj[j] = if j < self.cols { z - costs[j] } else { z };
        }
    }

    fn start_phase_one(&mut self) {
        let art = self.artificial();
        for i in 0..self.m {
            self.a[i * self.width + art] = -1.0;
        }
        self.blocked[art] = false;
        let mut costs = vec![0.0; self.cols];
        costs[art] = -1.0;
        self.set_costs(&costs);
        let row = (0..self.m)
            .min_by(|&x, &y| self.rhs(x).total_cmp(&self.rhs(y)))
            .expect("phase one needs a row");
        self.pivot(row, art);
    }

    fn drive_out_artificial(&mut self) {
        let art = self.artificial();
        if let Some(row) = self.basis.iter().position(|&b| b == art) {
            if let Some(col) = (0..self.n + self.m).find(|&j| self.at(row, j).abs() > PIVOT_EPS) {
                self.pivot(row, col);
            }
        }
        self.blocked[art] = true;
    }

    fn start_phase_two(&mut self, objective: &[f64]) {
        let mut costs = vec![0.0; self.cols];
        costs[..self.n].copy_from_slice(objective);
        self.set_costs(&costs);
    }

    fn run(&mut self, cap: usize, deadline: Option<Instant>) -> Result<Outcome> {
        let mut bland = false;
        let mut stall = 0usize;
        loop {
            let entering = if bland {
                (0..self.cols).find(|&j| !self.blocked[j] && self.obj[j] < -COST_EPS)
            } else {
                let mut best = None;
                let mut best_val = -COST_EPS;
                for j in 0..self.cols {
                    if !self.blocked[j] && self.obj[j] < best_val {
                        best_val = self.obj[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return Ok(Outcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aij = self.at(i, col);
                if aij > PIVOT_EPS {
                    let ratio = self.rhs(i).max(0.0) / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if ratio <= 1e-12 {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            self.pivot(row, col);
            self.iterations += 1;
            if self.iterations > cap {
                return Err(Error::NumericalFailure(format!(
                    "no convergence within {cap} pivots"
                )));
            }
            if self.iterations.is_multiple_of(64) {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Err(Error::NumericalFailure("time limit reached".into()));
                    }
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.a[row * w + col];
        for j in 0..w {
            self.a[row * w + j] /= p;
        }
        self.a[row * w + col] = 1.0;
        let (before, rest) = self.a.split_at_mut(row * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for other in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = other[col];
            if f != 0.0 {
                for (x, &pr) in other.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * pr;
                }
                other[col] = 0.0;
                if other[w - 1].abs() < 1e-13 {
                    other[w - 1] = 0.0;
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (x, &pr) in self.obj.iter_mut().zip(pivot_row.iter()) {
                *x -= f * pr;
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        x
    }

    fn dual(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.obj[self.n + i].max(0.0)).collect()
    }
}
