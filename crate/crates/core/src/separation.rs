//! Max-margin separation between pairs of nets.
//!
//! For nets `e` and `e'` with pin matrices `A` and `B`, the separator residual
//!
//! ```text
//! f(u, γ) = ‖(γ + 1 − A u)₊‖₂ + ‖(B u − γ + 1)₊‖₂
//! ```
//!
//! is zero exactly when the line `x·u = γ` puts every pin of `e` on the
//! positive side and every pin of `e'` on the negative side with unit
//! functional margin. It is convex in `(u, γ)`. Its minimum is zero when the
//! closed pin hulls are disjoint, and at least 2 when they meet.
//!
//! [`solve_separator`] minimizes it with damped Newton steps on the smoothed
//! form `√(‖r₁₊‖² + ε²) + √(‖r₂₊‖² + ε²)`, driving ε from 1 down to 1e-10,
//! from eight deterministic starts. Pins are centered and scaled before the
//! solve, and the result is mapped back.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::design::{Design, Placement};
use crate::geometry::{Point, Rect};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separator {
    /// Line normal; `e` pins satisfy `a·u ≥ γ + 1` at zero residual.
    pub u: Point,
    pub gamma: f64,
    /// Norm-form residual `f` at `(u, γ)`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BothNetsEmpty;

impl fmt::Display for BothNetsEmpty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cannot separate two empty pin sets")
    }
}

impl core::error::Error for BothNetsEmpty {}

/// Norm-form residual `f(e, e', u, γ)`.
pub fn residual(pos: &[Point], neg: &[Point], u: Point, gamma: f64) -> f64 {
    let (q1, q2) = hinge_sums(pos, neg, u, gamma);
    math::sqrt(q1) + math::sqrt(q2)
}

/// Squared-hinge pair objective `‖r₁₊‖² + ‖r₂₊‖²`, whose pin derivatives are
/// [`ns_gradient`].
pub fn squared_hinge(pos: &[Point], neg: &[Point], u: Point, gamma: f64) -> f64 {
    let (q1, q2) = hinge_sums(pos, neg, u, gamma);
    q1 + q2
}

fn hinge_sums(pos: &[Point], neg: &[Point], u: Point, gamma: f64) -> (f64, f64) {
    let q1 = pos.iter().map(|a| (gamma + 1.0 - a.dot(u)).max(0.0)).map(|r| r * r).sum();
    let q2 = neg.iter().map(|b| (b.dot(u) - gamma + 1.0).max(0.0)).map(|r| r * r).sum();
    (q1, q2)
}

/// Per-pin gradients of [`squared_hinge`] with `(u, γ)` frozen. Pins that
/// satisfy their margin get zero; all others are parallel to `u`.
pub fn ns_gradient(pos: &[Point], neg: &[Point], s: &Separator) -> (Vec<Point>, Vec<Point>) {
    let u = s.u;
    let gp = pos.iter().map(|a| u * (-2.0 * (s.gamma + 1.0 - a.dot(u)).max(0.0))).collect();
    let gn = neg.iter().map(|b| u * (2.0 * (b.dot(u) - s.gamma + 1.0).max(0.0))).collect();
    (gp, gn)
}

// Problem in centered, scaled coordinates: p = (a - center) / scale. With
// u' = scale·u and γ' = γ - u·center the residuals are unchanged.
struct Scaled {
    pos: Vec<Point>,
    neg: Vec<Point>,
    center: Point,
    scale: f64,
}

impl Scaled {
    fn new(pos: &[Point], neg: &[Point]) -> Self {
        let all = pos.iter().chain(neg.iter());
        let n = (pos.len() + neg.len()) as f64;
        let mut center = Point::ZERO;
        for p in all.clone() {
            center += *p;
        }
        center = center * (1.0 / n);
        let mut scale: f64 = 0.0;
        for p in all {
            let d = *p - center;
            scale = scale.max(d.x.abs()).max(d.y.abs());
        }
        if scale < 1e-12 {
            scale = 1.0;
        }
        let inv = 1.0 / scale;
        let map = |p: &Point| (*p - center) * inv;
        Self { pos: pos.iter().map(map).collect(), neg: neg.iter().map(map).collect(), center, scale }
    }

    fn to_scaled(&self, u: Point, gamma: f64) -> [f64; 3] {
        [u.x * self.scale, u.y * self.scale, gamma - u.dot(self.center)]
    }

    fn unscale(&self, z: [f64; 3]) -> (Point, f64) {
        let u = Point::new(z[0] / self.scale, z[1] / self.scale);
        (u, z[2] + u.dot(self.center))
    }

    fn true_residual(&self, z: [f64; 3]) -> f64 {
        residual(&self.pos, &self.neg, Point::new(z[0], z[1]), z[2])
    }

    /// Smoothed value, gradient and Hessian at `z`. Also returns the two
    /// hinge sums so callers can detect exact separation.
    fn smoothed(&self, z: [f64; 3], eps: f64) -> (f64, [f64; 3], [[f64; 3]; 3], f64, f64) {
        let u = Point::new(z[0], z[1]);
        let gamma = z[2];
        let mut total = 0.0;
        let mut grad = [0.0; 3];
        let mut hess = [[0.0; 3]; 3];
        let mut sums = [0.0; 2];
        for (side, pts) in [&self.pos, &self.neg].into_iter().enumerate() {
            let mut q = 0.0;
            let mut gq = [0.0; 3];
            let mut hq = [[0.0; 3]; 3];
            for p in pts.iter() {
                // Residual and its gradient w.r.t. (u, γ).
                let (r, dr) = if side == 0 {
                    (gamma + 1.0 - p.dot(u), [-p.x, -p.y, 1.0])
                } else {
                    (p.dot(u) - gamma + 1.0, [p.x, p.y, -1.0])
                };
                if r <= 0.0 {
                    continue;
                }
                q += r * r;
                for i in 0..3 {
                    gq[i] += 2.0 * r * dr[i];
                    for j in 0..3 {
                        hq[i][j] += 2.0 * dr[i] * dr[j];
                    }
                }
            }
            sums[side] = q;
            let t = math::sqrt(q + eps * eps);
            total += t - eps;
            for i in 0..3 {
                grad[i] += gq[i] / (2.0 * t);
                for j in 0..3 {
                    hess[i][j] += hq[i][j] / (2.0 * t) - gq[i] * gq[j] / (4.0 * t * t * t);
                }
            }
        }
        (total, grad, hess, sums[0], sums[1])
    }

    fn smoothed_value(&self, z: [f64; 3], eps: f64) -> f64 {
        let (q1, q2) = hinge_sums(&self.pos, &self.neg, Point::new(z[0], z[1]), z[2]);
        (math::sqrt(q1 + eps * eps) - eps) + (math::sqrt(q2 + eps * eps) - eps)
    }

    /// Continuation-Newton from `z`, returning the best point seen (by true
    /// residual) and its residual.
    fn descend(&self, mut z: [f64; 3], first_eps: f64) -> ([f64; 3], f64) {
        let mut best = z;
        let mut best_f = self.true_residual(z);
        if best_f == 0.0 {
            return (best, 0.0);
        }
        let mut eps = first_eps;
        while eps >= 1e-10 {
            for _ in 0..MAX_NEWTON_STEPS {
                let (val, g, h, q1, q2) = self.smoothed(z, eps);
                if q1 == 0.0 && q2 == 0.0 {
                    return (z, 0.0);
                }
                let Some(next) = damped_step(&h, &g, val, |trial| self.smoothed_value(trial, eps), z) else { break };
                let moved = (next[0] - z[0]).abs() + (next[1] - z[1]).abs() + (next[2] - z[2]).abs();
                z = next;
                let f = self.true_residual(z);
                if f < best_f {
                    best_f = f;
                    best = z;
                    if f == 0.0 {
                        return (best, 0.0);
                    }
                }
                if moved <= 1e-15 * (1.0 + z[0].abs() + z[1].abs() + z[2].abs()) {
                    break;
                }
            }
            eps *= 0.1;
        }
        (best, best_f)
    }

    fn starts(&self) -> [[f64; 3]; 8] {
        let centroid = |pts: &[Point]| {
            if pts.is_empty() {
                return Point::ZERO;
            }
            let mut c = Point::ZERO;
            for p in pts {
                c += *p;
            }
            c * (1.0 / pts.len() as f64)
        };
        let cp = centroid(&self.pos);
        let cn = centroid(&self.neg);
        let mut d = cp - cn;
        if d.norm() < 1e-12 {
            d = Point::new(1.0, 1.0);
        }
        let d = d * (1.0 / d.norm());
        let dirs = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, -1.0), d, -d, d.perp(), -d.perp()];
        let mid = (cp + cn) * 0.5;
        let mut out = [[0.0; 3]; 8];
        for (slot, dir) in out.iter_mut().zip(dirs) {
            let u = dir * 2.0;
            *slot = [u.x, u.y, u.dot(mid)];
        }
        out
    }
}

const MAX_NEWTON_STEPS: usize = 60;

/// One Levenberg-Marquardt step: solve `(H + μI) d = -g`, raising the ridge
/// `μ` until Armijo backtracking accepts a point. `None` once no descent is
/// possible at working precision.
fn damped_step(h: &[[f64; 3]; 3], g: &[f64; 3], val: f64, value: impl Fn([f64; 3]) -> f64, z: [f64; 3]) -> Option<[f64; 3]> {
    let trace = h[0][0].abs() + h[1][1].abs() + h[2][2].abs();
    let gnorm = math::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if !(gnorm > 0.0) {
        return None;
    }
    let mut mu = 1e-12 * (1.0 + trace);
    while mu <= 1e16 * (1.0 + trace + gnorm) {
        let mut m = *h;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += mu;
        }
        if let Some(d) = solve3(m, [-g[0], -g[1], -g[2]]).filter(|d| d.iter().all(|v| v.is_finite())) {
            let slope = g[0] * d[0] + g[1] * d[1] + g[2] * d[2];
            if slope < 0.0 {
                let mut t = 1.0;
                for _ in 0..20 {
                    let trial = [z[0] + t * d[0], z[1] + t * d[1], z[2] + t * d[2]];
                    if trial == z {
                        return None;
                    }
                    if value(trial) <= val + 1e-4 * t * slope {
                        return Some(trial);
                    }
                    t *= 0.5;
                }
            }
        }
        mu *= 1e3;
    }
    None
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &c| m[a][col].abs().total_cmp(&m[c][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

/// Minimize the separator residual from all eight restarts and keep the best.
pub fn solve_separator(pos: &[Point], neg: &[Point]) -> Result<Separator, BothNetsEmpty> {
    if pos.is_empty() && neg.is_empty() {
        return Err(BothNetsEmpty);
    }
    let scaled = Scaled::new(pos, neg);
    let mut best: Option<([f64; 3], f64)> = None;
    for start in scaled.starts() {
        let (z, f) = scaled.descend(start, 1.0);
        if best.is_none_or(|(_, bf)| f < bf) {
            best = Some((z, f));
        }
        if f == 0.0 {
            break;
        }
    }
    let (z, _) = best.expect("eight starts");
    Ok(finish(&scaled, pos, neg, z))
}

/// Resume from a previous solution; falls back to a full solve when the warm
/// residual is more than 10% worse than the previous one.
pub fn solve_separator_warm(pos: &[Point], neg: &[Point], prev: &Separator) -> Result<Separator, BothNetsEmpty> {
    if pos.is_empty() && neg.is_empty() {
        return Err(BothNetsEmpty);
    }
    let scaled = Scaled::new(pos, neg);
    let (z, _) = scaled.descend(scaled.to_scaled(prev.u, prev.gamma), 1e-3);
    let warm = finish(&scaled, pos, neg, z);
    if warm.residual > 1.1 * prev.residual + 1e-9 {
        let full = solve_separator(pos, neg)?;
        if full.residual < warm.residual {
            return Ok(full);
        }
    }
    Ok(warm)
}

fn finish(scaled: &Scaled, pos: &[Point], neg: &[Point], z: [f64; 3]) -> Separator {
    let (u, gamma) = scaled.unscale(z);
    // Report the residual in the caller's coordinates.
    Separator { u, gamma, residual: residual(pos, neg, u, gamma) }
}

/// Unordered pairs of distinct nets entering the separation term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    pub pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// All unordered pairs of nets with at least one pin. With `radius`, keep
/// only pairs whose pin bounding boxes, each inflated by the radius, meet.
pub fn pair_set(design: &Design, placement: &Placement, radius: Option<f64>) -> PairSet {
    let n = design.nets.len();
    let boxes: Vec<Option<Rect>> = (0..n)
        .map(|e| {
            let pins = design.net_pins(placement, e);
            bounding_box(&pins)
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (Some(a), Some(b)) = (boxes[i], boxes[j]) else { continue };
            let keep = match radius {
                None => true,
                Some(rho) if rho == f64::INFINITY => true,
                Some(rho) => {
                    a.x - rho <= b.right() + rho && b.x - rho <= a.right() + rho && a.y - rho <= b.top() + rho && b.y - rho <= a.top() + rho
                }
            };
            if keep {
                pairs.push((i, j));
            }
        }
    }
    PairSet { pairs }
}

fn bounding_box(pins: &[Point]) -> Option<Rect> {
    let first = pins.first()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
    for p in pins {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    Some(Rect::new(x0, y0, x1 - x0, y1 - y0))
}

/// Pair-averaged separator residual from fresh solves. Zero for an empty
/// pair set.
pub fn ns_cost(design: &Design, placement: &Placement, pairs: &PairSet) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let pins = design.all_net_pins(placement);
    let values = map_pairs(&pairs.pairs, |&(e, f)| solve_separator(&pins[e], &pins[f]).map(|s| s.residual).unwrap_or(0.0));
    values.iter().sum::<f64>() / pairs.len() as f64
}

#[cfg(feature = "parallel")]
fn map_pairs<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_pairs<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Warm-start state: one separator slot per pair, reused across iterations.
#[derive(Debug, Clone, Default)]
pub struct SeparatorCache {
    slots: Vec<Option<Separator>>,
    solves: usize,
}

impl SeparatorCache {
    pub fn new(pairs: &PairSet) -> Self {
        Self { slots: vec![None; pairs.len()], solves: 0 }
    }

    /// Number of separator solves performed so far.
    pub fn solves(&self) -> usize {
        self.solves
    }

    pub fn separators(&self) -> &[Option<Separator>] {
        &self.slots
    }

    /// Re-solve every pair at the current pin positions. Results are written
    /// back in pair order, so the outcome does not depend on thread count.
    pub fn refresh(&mut self, pairs: &PairSet, net_pins: &[Vec<Point>]) {
        if self.slots.len() != pairs.len() {
            self.slots = vec![None; pairs.len()];
        }
        let jobs: Vec<((usize, usize), Option<Separator>)> = pairs.pairs.iter().copied().zip(self.slots.iter().copied()).collect();
        let solved = map_pairs(&jobs, |&((e, f), prev)| {
            let (a, b) = (&net_pins[e], &net_pins[f]);
            match prev {
                Some(prev) => solve_separator_warm(a, b, &prev).ok(),
                None => solve_separator(a, b).ok(),
            }
        });
        self.solves += jobs.len();
        self.slots = solved;
    }

    /// Pair-averaged residual of the cached separators.
    pub fn mean_residual(&self) -> f64 {
        if self.slots.is_empty() {
            return 0.0;
        }
        self.slots.iter().map(|s| s.map_or(0.0, |s| s.residual)).sum::<f64>() / self.slots.len() as f64
    }
}
