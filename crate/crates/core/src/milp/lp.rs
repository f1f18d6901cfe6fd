//! Dense-tableau bounded dual simplex.
//!
//! Every row gets a slack (`[0, ∞)` for inequalities, `[0, 0]` for
//! equalities) after `≥` rows are negated, so the all-slack basis is a
//! starting point. Structural variables must be boxed; a nonbasic structural
//! sits at the bound its reduced cost favors, which makes every basis dual
//! feasible regardless of the bounds. Bound changes between solves therefore
//! only disturb primal feasibility, which is what the dual method repairs.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min cost·x` subject to the rows and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(Row { coefs, sense, rhs });
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((v, l), u) in x.iter().zip(&self.lower).zip(&self.upper) {
            worst = worst.max(l - v).max(v - u);
        }
        for row in &self.rows {
            let a: f64 = row.coefs.iter().map(|&(j, c)| c * x[j]).sum();
            let v = match row.sense {
                Sense::Le => a - row.rhs,
                Sense::Ge => row.rhs - a,
                Sense::Eq => (a - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
}

const PRIMAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
/// Pivots between tableau rebuilds from the slack basis.
const REFRESH_PIVOTS: usize = 20_000;
/// Non-improving iterations before switching to Bland's rule.
const STALL_LIMIT: usize = 200;

/// Solver state that survives bound changes, so branch-and-bound nodes can
/// warm start from the previous node's basis.
#[derive(Debug, Clone)]
pub struct DualSimplex {
    lp: LinearProgram,
    m: usize,
    cols: usize,
    // Row-converted constraint data: `a_i·x + s_i = b_i`.
    b: Vec<f64>,
    tab: Vec<f64>,
    beta: Vec<f64>,
    d: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    x: Vec<f64>,
    pivots_since_reset: usize,
    pivots: usize,
    nonzero: Vec<(usize, f64)>,
}

impl DualSimplex {
    pub fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let cols = n + m;
        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let mut b = Vec::with_capacity(m);
        for row in &lp.rows {
            b.push(if row.sense == Sense::Ge { -row.rhs } else { row.rhs });
            lower.push(0.0);
            upper.push(if row.sense == Sense::Eq { 0.0 } else { f64::INFINITY });
        }
        let mut cost = lp.cost.clone();
        cost.resize(cols, 0.0);
        let mut s = Self {
            lp: lp.clone(),
            m,
            cols,
            b,
            tab: Vec::new(),
            beta: Vec::new(),
            d: Vec::new(),
            cost,
            lower,
            upper,
            basis: Vec::new(),
            state: Vec::new(),
            x: vec![0.0; cols],
            pivots_since_reset: 0,
            pivots: 0,
            nonzero: Vec::new(),
        };
        s.reset();
        s
    }

    /// Back to the all-slack basis.
    fn reset(&mut self) {
        let (m, cols) = (self.m, self.cols);
        let n = cols - m;
        self.tab = vec![0.0; m * cols];
        for (i, row) in self.lp.rows.iter().enumerate() {
            let sign = if row.sense == Sense::Ge { -1.0 } else { 1.0 };
            for &(j, c) in &row.coefs {
                self.tab[i * cols + j] += sign * c;
            }
            self.tab[i * cols + n + i] = 1.0;
        }
        self.beta = self.b.clone();
        self.d = self.cost.clone();
        self.basis = (n..cols).collect();
        self.state = vec![State::Lower; cols];
        for i in 0..m {
            self.state[n + i] = State::Basic;
        }
        for j in 0..n {
            self.place_nonbasic(j);
        }
        self.compute_basics();
        self.pivots_since_reset = 0;
    }

    pub fn num_vars(&self) -> usize {
        self.cols - self.m
    }

    /// Total pivots performed.
    pub fn pivots(&self) -> usize {
        self.pivots
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    /// Change a structural's bounds; takes effect at the next solve.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.state[j] != State::Basic {
            self.place_nonbasic(j);
        }
    }

    fn place_nonbasic(&mut self, j: usize) {
        let st = if self.d[j] < 0.0 && self.upper[j].is_finite() {
            State::Upper
        } else if self.lower[j].is_finite() {
            State::Lower
        } else {
            State::Upper
        };
        self.state[j] = st;
        let value = if st == State::Lower { self.lower[j] } else { self.upper[j] };
        let delta = value - self.x[j];
        self.x[j] = value;
        // Keep the basics consistent with the moved nonbasic.
        if delta != 0.0 && delta.is_finite() && !self.basis.is_empty() {
            let cols = self.cols;
            for i in 0..self.m {
                let t = self.tab[i * cols + j];
                if t != 0.0 {
                    self.x[self.basis[i]] -= t * delta;
                }
            }
        }
    }

    fn compute_basics(&mut self) {
        let cols = self.cols;
        for i in 0..self.m {
            let row = &self.tab[i * cols..(i + 1) * cols];
            let mut v = self.beta[i];
            for (j, &t) in row.iter().enumerate() {
                if t != 0.0 && self.state[j] != State::Basic {
                    v -= t * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    /// Structural values of the current basic solution.
    pub fn values(&self) -> Vec<f64> {
        self.x[..self.num_vars()].to_vec()
    }

    pub fn objective(&self) -> f64 {
        self.lp.objective(&self.x[..self.num_vars()])
    }

    /// Run the dual simplex from the current basis. On optimality the
    /// solution is checked against the original rows and re-solved from
    /// the slack basis if the tableau has drifted.
    pub fn solve(&mut self, max_iterations: usize) -> LpStatus {
        if self.pivots_since_reset >= REFRESH_PIVOTS {
            self.reset();
        }
        let status = self.run(max_iterations);
        if status != LpStatus::Optimal {
            return status;
        }
        if self.lp_violation() > 1e-7 {
            self.reset();
            return self.run(max_iterations);
        }
        status
    }

    fn lp_violation(&self) -> f64 {
        let n = self.num_vars();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            worst = worst.max(self.lower[j] - self.x[j]).max(self.x[j] - self.upper[j]);
        }
        for row in &self.lp.rows {
            let a: f64 = row.coefs.iter().map(|&(j, c)| c * self.x[j]).sum();
            let scale = 1.0 + row.rhs.abs() + row.coefs.iter().map(|&(j, c)| (c * self.x[j]).abs()).sum::<f64>();
            let v = match row.sense {
                Sense::Le => a - row.rhs,
                Sense::Ge => row.rhs - a,
                Sense::Eq => (a - row.rhs).abs(),
            };
            worst = worst.max(v / scale);
        }
        worst
    }

    fn run(&mut self, max_iterations: usize) -> LpStatus {
        let cols = self.cols;
        let mut bland = false;
        let mut best_obj = f64::NEG_INFINITY;
        let mut stall = 0;
        // Basic values are updated incrementally and recomputed from the
        // tableau periodically and before optimality is declared.
        let mut fresh = false;
        for it in 0..max_iterations {
            if !fresh && it > 0 && it % 64 == 0 {
                self.compute_basics();
                fresh = true;
            }
            // Leaving row: largest bound violation (lowest variable under Bland).
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let j = self.basis[i];
                let v = self.x[j];
                let viol = if v < self.lower[j] - PRIMAL_TOL * (1.0 + self.lower[j].abs()) {
                    self.lower[j] - v
                } else if v > self.upper[j] + PRIMAL_TOL * (1.0 + self.upper[j].abs()) {
                    v - self.upper[j]
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        if bland {
                            j < self.basis[r]
                        } else {
                            viol > best
                        }
                    }
                };
                if better {
                    leave = Some((i, viol));
                }
            }
            let Some((r, _)) = leave else {
                if fresh {
                    return LpStatus::Optimal;
                }
                self.compute_basics();
                fresh = true;
                continue;
            };
            let leaving = self.basis[r];
            let increase = self.x[leaving] < self.lower[leaving];

            // Ratio test over nonbasic columns that can push the leaving
            // variable toward its violated bound.
            let row = &self.tab[r * cols..(r + 1) * cols];
            let candidate = |j: usize, alpha: f64| -> Option<f64> {
                let st = self.state[j];
                if st == State::Basic || self.lower[j] == self.upper[j] || alpha.abs() <= PIVOT_TOL {
                    return None;
                }
                let ok = match (st, increase) {
                    (State::Lower, true) => alpha < 0.0,
                    (State::Upper, true) => alpha > 0.0,
                    (State::Lower, false) => alpha > 0.0,
                    (State::Upper, false) => alpha < 0.0,
                    _ => false,
                };
                if !ok {
                    return None;
                }
                let dj = if st == State::Lower { self.d[j] } else { -self.d[j] };
                Some(dj.max(0.0))
            };
            let mut enter: Option<usize> = None;
            if bland {
                let mut best = f64::INFINITY;
                for (j, &alpha) in row.iter().enumerate() {
                    if let Some(dj) = candidate(j, alpha) {
                        let ratio = dj / alpha.abs();
                        if ratio < best {
                            best = ratio;
                            enter = Some(j);
                        }
                    }
                }
            } else {
                // Harris two-pass: widest bound with tolerance, then the
                // largest pivot under it.
                let mut bound = f64::INFINITY;
                for (j, &alpha) in row.iter().enumerate() {
                    if let Some(dj) = candidate(j, alpha) {
                        bound = bound.min((dj + DUAL_TOL) / alpha.abs());
                    }
                }
                let mut best_alpha = 0.0;
                for (j, &alpha) in row.iter().enumerate() {
                    if let Some(dj) = candidate(j, alpha) {
                        if dj / alpha.abs() <= bound && alpha.abs() > best_alpha {
                            best_alpha = alpha.abs();
                            enter = Some(j);
                        }
                    }
                }
            }
            let Some(q) = enter else { return LpStatus::Infeasible };
            self.pivot(r, q, increase);
            fresh = false;

            let obj = self.objective();
            if obj > best_obj + 1e-12 * (1.0 + obj.abs()) {
                best_obj = obj;
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
        LpStatus::IterationLimit
    }

    fn pivot(&mut self, r: usize, q: usize, increase: bool) {
        let cols = self.cols;
        let alpha = self.tab[r * cols + q];
        let leaving = self.basis[r];
        let target = if increase { self.lower[leaving] } else { self.upper[leaving] };
        // Move the entering variable just far enough to land the leaving one
        // on its bound.
        let theta = (self.x[leaving] - target) / alpha;
        for i in 0..self.m {
            let t = self.tab[i * cols + q];
            if i != r && t != 0.0 {
                self.x[self.basis[i]] -= t * theta;
            }
        }
        self.x[q] += theta;
        let inv = 1.0 / alpha;
        for v in &mut self.tab[r * cols..(r + 1) * cols] {
            *v *= inv;
        }
        self.beta[r] *= inv;
        self.tab[r * cols + q] = 1.0;
        let (before, rest) = self.tab.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        // Pivot rows are sparse; only their nonzero columns change elsewhere.
        self.nonzero.clear();
        self.nonzero.extend((0..cols).filter(|&j| pivot_row[j] != 0.0).map(|j| (j, pivot_row[j])));
        let nz = &self.nonzero;
        for (i, other) in before.chunks_exact_mut(cols).chain(after.chunks_exact_mut(cols)).enumerate() {
            let f = other[q];
            if f == 0.0 {
                continue;
            }
            for &(j, p) in nz {
                other[j] -= f * p;
            }
            other[q] = 0.0;
            let row_index = if i < r { i } else { i + 1 };
            self.beta[row_index] -= f * self.beta[r];
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for &(j, p) in nz {
                self.d[j] -= dq * p;
            }
        }
        self.d[q] = 0.0;

        self.state[leaving] = if increase { State::Lower } else { State::Upper };
        self.x[leaving] = target;
        self.basis[r] = q;
        self.state[q] = State::Basic;
        self.pivots += 1;
        self.pivots_since_reset += 1;
    }
}
