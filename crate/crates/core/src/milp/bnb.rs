//! Branch-and-bound over the binaries of a [`LinearProgram`].
//!
//! Depth-first plunges with best-bound restarts: every node solves its LP
//! relaxation on one warm-started [`DualSimplex`], branches on the most
//! fractional binary and dives into one child while the sibling waits. When a
//! plunge ends, the open node with the lowest parent bound is taken next.

use alloc::vec;
use alloc::vec::Vec;

use super::lp::{DualSimplex, LinearProgram, LpStatus};

/// Seconds since the solve started. `no_std` callers without a clock use
/// [`NoClock`] and rely on the node limit.
pub trait Clock {
    fn elapsed(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbConfig {
    /// Wall-clock cap in seconds.
    pub time_cap: f64,
    /// Nodes whose bound is within this of the incumbent are pruned.
    pub gap: f64,
    /// Cap on LP relaxations solved.
    pub node_limit: Option<usize>,
}

impl Default for BnbConfig {
    fn default() -> Self {
        Self { time_cap: 4.0 * 3600.0, gap: 1e-6, node_limit: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    /// A limit stopped the search; the incumbent is the best found.
    FeasibleTimeout,
    Infeasible,
    /// A limit stopped the search before any feasible point was found.
    Unsolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbResult {
    /// Incumbent with binaries rounded.
    pub values: Option<Vec<f64>>,
    pub objective: f64,
    pub status: MilpStatus,
    /// LP relaxations solved, warm-start probe included.
    pub nodes: usize,
    /// Simplex pivots over all relaxations.
    pub pivots: usize,
}

#[derive(Debug, Clone)]
struct Node {
    fixings: Vec<(usize, f64)>,
    bound: f64,
    seq: usize,
}

const INT_TOL: f64 = 1e-6;

struct Search<'a> {
    lp: &'a LinearProgram,
    binaries: &'a [usize],
    simplex: DualSimplex,
    current: Vec<(f64, f64)>,
    max_iterations: usize,
}

impl Search<'_> {
    /// Put every binary at `[0, 1]` except the fixed ones.
    fn apply(&mut self, fixings: &[(usize, f64)]) {
        let mut want = vec![(0.0, 1.0); self.binaries.len()];
        for &(k, v) in fixings {
            want[k] = (v, v);
        }
        for (k, &b) in self.binaries.iter().enumerate() {
            if self.current[k] != want[k] {
                self.current[k] = want[k];
                self.simplex.set_bounds(b, want[k].0, want[k].1);
            }
        }
    }

    fn solve(&mut self) -> LpStatus {
        self.simplex.solve(self.max_iterations)
    }

    fn most_fractional(&self, values: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, &b) in self.binaries.iter().enumerate() {
            let frac = (values[b] - libm::round(values[b])).abs();
            if frac > INT_TOL && best.is_none_or(|(_, f)| frac > f) {
                best = Some((k, frac));
            }
        }
        best.map(|(k, _)| k)
    }

    fn rounded(&self, mut values: Vec<f64>) -> Vec<f64> {
        for &b in self.binaries {
            values[b] = libm::round(values[b]);
        }
        values
    }

    fn objective(&self) -> f64 {
        self.lp.objective(&self.simplex.values())
    }
}

/// Minimize `lp` with `binaries` restricted to {0, 1}. `hint` (indexed like
/// the variables) is first tried as a complete binary assignment to seed the
/// incumbent, then steers which child each plunge enters first.
pub fn branch_and_bound(lp: &LinearProgram, binaries: &[usize], cfg: &BnbConfig, clock: &dyn Clock, hint: Option<&[f64]>) -> BnbResult {
    let mut s = Search {
        lp,
        binaries,
        simplex: DualSimplex::new(lp),
        current: vec![(f64::NAN, f64::NAN); binaries.len()],
        max_iterations: 50 * (lp.num_vars() + lp.rows.len()) + 1000,
    };
    let mut nodes = 0;
    let mut incumbent: Option<Vec<f64>> = None;
    let mut best = f64::INFINITY;
    let out_of_budget = |nodes: usize| cfg.node_limit.is_some_and(|l| nodes >= l) || clock.elapsed() >= cfg.time_cap;

    if let Some(h) = hint {
        let fixings: Vec<(usize, f64)> = binaries.iter().enumerate().map(|(k, &b)| (k, libm::round(h[b]))).collect();
        if !out_of_budget(nodes) {
            s.apply(&fixings);
            nodes += 1;
            if s.solve() == LpStatus::Optimal {
                best = s.objective();
                incumbent = Some(s.rounded(s.simplex.values()));
            }
        }
    }

    let mut open = vec![Node { fixings: Vec::new(), bound: f64::NEG_INFINITY, seq: 0 }];
    let mut seq = 1;
    let mut stopped = false;
    let mut incomplete = false;
    'search: while !open.is_empty() {
        let pick = (0..open.len())
            .min_by(|&a, &b| open[a].bound.total_cmp(&open[b].bound).then(open[b].seq.cmp(&open[a].seq)))
            .expect("open list is non-empty");
        let mut node = open.swap_remove(pick);
        loop {
            if node.bound >= best - cfg.gap {
                break;
            }
            if out_of_budget(nodes) {
                stopped = true;
                break 'search;
            }
            s.apply(&node.fixings);
            nodes += 1;
            match s.solve() {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => break,
                LpStatus::IterationLimit => {
                    incomplete = true;
                    break;
                }
            }
            let obj = s.objective();
            if obj >= best - cfg.gap {
                break;
            }
            let values = s.simplex.values();
            let Some(k) = s.most_fractional(&values) else {
                best = obj;
                incumbent = Some(s.rounded(values));
                break;
            };
            let b = binaries[k];
            let first = match hint {
                Some(h) => libm::round(h[b]),
                None => libm::round(values[b]),
            };
            let mut other = node.fixings.clone();
            other.push((k, 1.0 - first));
            open.push(Node { fixings: other, bound: obj, seq });
            node.fixings.push((k, first));
            node.bound = obj;
            node.seq = seq + 1;
            seq += 2;
        }
    }

    let status = match (&incumbent, stopped || incomplete) {
        (Some(_), false) => MilpStatus::Optimal,
        (Some(_), true) => MilpStatus::FeasibleTimeout,
        (None, false) => MilpStatus::Infeasible,
        (None, true) => MilpStatus::Unsolved,
    };
    BnbResult { values: incumbent, objective: best, status, nodes, pivots: s.simplex.pivots() }
}
