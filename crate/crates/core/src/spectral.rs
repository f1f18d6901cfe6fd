//! Spectral seeding from the area-weighted normalized Laplacian, plus the
//! orientation search that picks the best seed variant.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::design::{Design, Orientation, Placement, Pose};
use crate::geometry::Point;
use crate::math::{self, SplitMix64};
use crate::objective::{total_objective, Objective};

/// Component connectivity under the clique net model.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueGraph {
    pub n: usize,
    /// Sorted neighbor lists; symmetric, no self-loops.
    pub adjacency: Vec<Vec<(usize, f64)>>,
    pub degrees: Vec<f64>,
    pub areas: Vec<f64>,
}

impl CliqueGraph {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[i].binary_search_by_key(&j, |&(k, _)| k).map_or(0.0, |k| self.adjacency[i][k].1)
    }

    pub fn total_weight(&self) -> f64 {
        self.adjacency.iter().enumerate().flat_map(|(i, row)| row.iter().filter(move |(j, _)| *j > i)).map(|(_, w)| w).sum()
    }
}

/// Each k-pin net adds `1/(k−1)` between every pair of distinct components
/// it touches.
pub fn clique_expand(design: &Design) -> CliqueGraph {
    let n = design.components.len();
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for net in &design.nets {
        let k = net.pins.len();
        if k < 2 {
            continue;
        }
        let w = 1.0 / (k - 1) as f64;
        for (a, pa) in net.pins.iter().enumerate() {
            for pb in &net.pins[a + 1..] {
                if pa.comp == pb.comp {
                    continue;
                }
                *rows[pa.comp].entry(pb.comp).or_insert(0.0) += w;
                *rows[pb.comp].entry(pa.comp).or_insert(0.0) += w;
            }
        }
    }
    let adjacency: Vec<Vec<(usize, f64)>> = rows.into_iter().map(|r| r.into_iter().collect()).collect();
    let degrees = adjacency.iter().map(|r| r.iter().map(|(_, w)| w).sum()).collect();
    let areas = design.components.iter().map(|c| c.area()).collect();
    CliqueGraph { n, adjacency, degrees, areas }
}

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// `I − R^{-1/2} A R^{-1/2}`; isolated nodes keep an identity row.
pub fn normalized_laplacian(g: &CliqueGraph) -> SymMatrix {
    let n = g.n;
    let mut data = vec![0.0; n * n];
    let inv = inv_sqrt_degrees(g);
    for i in 0..n {
        data[i * n + i] = 1.0;
        for &(j, w) in &g.adjacency[i] {
            data[i * n + j] = -w * inv[i] * inv[j];
        }
    }
    SymMatrix { n, data }
}

fn inv_sqrt_degrees(g: &CliqueGraph) -> Vec<f64> {
    g.degrees.iter().map(|&d| if d > 0.0 { 1.0 / math::sqrt(d) } else { 0.0 }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl SpectralConfig {
    /// `c1 = c2 = n`, `c3 = 0`.
    pub fn for_design(design: &Design) -> Self {
        let n = design.components.len().max(1) as f64;
        Self { c1: n, c2: n, c3: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralError {
    /// `c1` or `c2` not strictly positive.
    InvalidScale,
    /// Lanczos did not reach the residual tolerance within the cap.
    NoConvergence { iterations: usize },
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidScale => write!(f, "spectral scale constants c1 and c2 must be positive"),
            Self::NoConvergence { iterations } => write!(f, "eigensolver did not converge after {iterations} iterations"),
        }
    }
}

impl core::error::Error for SpectralError {}

pub const EIGEN_TOLERANCE: f64 = 1e-8;
pub const EIGEN_ITERATION_CAP: usize = 10_000;

/// Raw embedding before rescaling to the board.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub eigenvalues: [f64; 2],
    pub iterations: usize,
}

/// Operator `P V^{-1/2} L V^{-1/2} P`, with `P` projecting out `sqrt(v)`.
struct Operator<'g> {
    g: &'g CliqueGraph,
    inv_deg: Vec<f64>,
    inv_area: Vec<f64>,
    s: Vec<f64>,
}

impl<'g> Operator<'g> {
    fn new(g: &'g CliqueGraph) -> Self {
        let inv_area = g.areas.iter().map(|&a| 1.0 / math::sqrt(a)).collect();
        let norm = math::sqrt(g.areas.iter().sum::<f64>());
        let s = g.areas.iter().map(|&a| math::sqrt(a) / norm).collect();
        Self { g, inv_deg: inv_sqrt_degrees(g), inv_area, s }
    }

    fn project(&self, z: &mut [f64]) {
        let d = dot(&self.s, z);
        axpy(z, -d, &self.s);
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) {
        let t: Vec<f64> = z.iter().zip(&self.inv_area).map(|(z, a)| z * a).collect();
        for i in 0..self.g.n {
            let mut acc = t[i];
            for &(j, w) in &self.g.adjacency[i] {
                acc -= w * self.inv_deg[i] * self.inv_deg[j] * t[j];
            }
            out[i] = acc * self.inv_area[i];
        }
        self.project(out);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * x;
    }
}

fn normalize(z: &mut [f64]) -> f64 {
    let n = math::sqrt(dot(z, z));
    if n > 0.0 {
        z.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Two smallest eigenpairs of the deflated area-weighted operator. The
/// returned vectors satisfy `v·x = 0` and `x^T V x = c1` (`c2` for `y`).
pub fn spectral_embedding(g: &CliqueGraph, cfg: &SpectralConfig, seed: u64) -> Result<Embedding, SpectralError> {
    if !(cfg.c1 > 0.0 && cfg.c2 > 0.0) {
        return Err(SpectralError::InvalidScale);
    }
    let n = g.n;
    let dim = n.saturating_sub(1);
    assert!(dim >= 2, "spectral embedding needs at least three nodes");
    let op = Operator::new(g);
    let (vals, vecs, iterations) = lanczos(&op, dim, 2, seed)?;
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for (k, z) in vecs.iter().enumerate() {
        let scale = math::sqrt(if k == 0 { cfg.c1 } else { cfg.c2 });
        for i in 0..n {
            out[k][i] = z[i] * op.inv_area[i] * scale;
        }
        fix_sign(&mut out[k]);
    }
    let [x, y] = out;
    Ok(Embedding { x, y, eigenvalues: [vals[0], vals[1]], iterations })
}

// Largest-magnitude entry positive, earliest index on ties.
fn fix_sign(x: &mut [f64]) {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if x.get(best).is_some_and(|&v| v < 0.0) {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Lanczos with full reorthogonalization for the `want` smallest eigenpairs
/// on the `dim`-dimensional complement of `op.s`.
fn lanczos(op: &Operator<'_>, dim: usize, want: usize, seed: u64) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize), SpectralError> {
    let n = op.g.n;
    let mut rng = SplitMix64::new(seed);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = restart_vector(op, &basis, &mut rng, n);
    let mut w = vec![0.0; n];
    let min_steps = dim.min(30);
    let mut iter = 0;
    while iter < EIGEN_ITERATION_CAP {
        iter += 1;
        op.apply(&q, &mut w);
        let a = dot(&q, &w);
        axpy(&mut w, -a, &q);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(&mut w, -b, prev);
        }
        basis.push(q.clone());
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(&mut w, -c, v);
            }
            op.project(&mut w);
        }
        let k = basis.len();
        let mut b = math::sqrt(dot(&w, &w));
        let scale = alpha.iter().map(|a| a.abs()).fold(1.0, f64::max);
        let breakdown = b <= 1e-10 * scale;
        if k == dim || (k >= min_steps && (breakdown || k.is_multiple_of(5))) {
            let (vals, z) = tridiagonal_eigen(&alpha, &beta);
            let resid_b = if breakdown { 0.0 } else { b };
            let converged = k == dim || (0..want).all(|j| (resid_b * z[(k - 1) * k + j]).abs() <= EIGEN_TOLERANCE * scale);
            if converged && (k == dim || !breakdown || invariant_is_enough(k, dim)) {
                let vecs = (0..want)
                    .map(|j| {
                        let mut x = vec![0.0; n];
                        for (i, v) in basis.iter().enumerate() {
                            axpy(&mut x, z[i * k + j], v);
                        }
                        op.project(&mut x);
                        normalize(&mut x);
                        x
                    })
                    .collect();
                return Ok((vals[..want].to_vec(), vecs, iter));
            }
        }
        if breakdown {
            // Invariant subspace: continue in a fresh direction.
            q = restart_vector(op, &basis, &mut rng, n);
            b = 0.0;
        } else {
            q = w.iter().map(|v| v / b).collect();
        }
        beta.push(b);
    }
    Err(SpectralError::NoConvergence { iterations: iter })
}

// An invariant Krylov space can hide smaller eigenvalues elsewhere, so only
// accept it once the whole space has been spanned.
fn invariant_is_enough(k: usize, dim: usize) -> bool {
    k == dim
}

fn restart_vector(op: &Operator<'_>, basis: &[Vec<f64>], rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    loop {
        let mut q: Vec<f64> = (0..n).map(|_| rng.next_signed()).collect();
        for _ in 0..2 {
            op.project(&mut q);
            for v in basis {
                let c = dot(v, &q);
                axpy(&mut q, -c, v);
            }
        }
        if normalize(&mut q) > 1e-8 {
            return q;
        }
    }
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `d` and off-diagonal `e` (`e.len() == d.len() − 1`). Eigenvalues are
/// ascending; eigenvector `j` is column `j` of the row-major result.
pub fn tridiagonal_eigen(d: &[f64], e: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(core::iter::once(0.0)).take(n).collect();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    // Implicit QL with Wilkinson shifts.
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= f64::EPSILON * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= f64::EPSILON * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // Sort ascending, carrying columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let vals = order.iter().map(|&i| d[i]).collect();
    let mut zs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            zs[k * n + new] = z[k * n + old];
        }
    }
    (vals, zs)
}

/// Spectral seed placement, unrotated. Centers span the middle 80% of each
/// board axis; fixed components are snapped afterwards.
pub fn spectral_coordinates(design: &Design, cfg: &SpectralConfig, seed: u64) -> Result<Placement, SpectralError> {
    if !(cfg.c1 > 0.0 && cfg.c2 > 0.0) {
        return Err(SpectralError::InvalidScale);
    }
    if design.components.len() < 3 {
        return Ok(Placement::centered(design));
    }
    let emb = spectral_embedding(&clique_expand(design), cfg, seed)?;
    let board = &design.board;
    let xs = rescale(&emb.x, board.width);
    let ys = rescale(&emb.y, board.height);
    let mut placement = Placement::new(
        design
            .components
            .iter()
            .zip(xs.iter().zip(&ys))
            .map(|(c, (&cx, &cy))| Pose::new(cx - 0.5 * c.width, cy - 0.5 * c.height, Orientation::R0))
            .collect(),
    );
    for i in 0..design.components.len() {
        placement.clamp_into_board(design, i);
    }
    placement.snap_fixed(design);
    Ok(placement)
}

fn rescale(v: &[f64], side: f64) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 1e-12 * hi.abs().max(lo.abs()).max(1e-300)) {
        return vec![0.5 * side; v.len()];
    }
    v.iter().map(|&x| 0.1 * side + 0.8 * side * (x - lo) / span).collect()
}

/// Mirror movable component centers about the board center.
pub fn flip(design: &Design, placement: &Placement, flip_x: bool, flip_y: bool) -> Placement {
    let (w, h) = (design.board.width, design.board.height);
    let mut out = placement.clone();
    for (i, comp) in design.components.iter().enumerate() {
        if comp.is_fixed() {
            continue;
        }
        let pose = placement.poses[i];
        let c = comp.center(&pose);
        let c = Point::new(if flip_x { w - c.x } else { c.x }, if flip_y { h - c.y } else { c.y });
        out.poses[i] = centered_pose(comp.dims(pose.r), c, pose.r);
        out.clamp_into_board(design, i);
    }
    out
}

fn centered_pose((w, h): (f64, f64), c: Point, r: Orientation) -> Pose {
    Pose::new(c.x - 0.5 * w, c.y - 0.5 * h, r)
}

fn improves(new: f64, cur: f64) -> bool {
    new < cur - 1e-12 * cur.abs().max(1.0)
}

/// Try the four global flips of `seed`, each followed by one greedy sweep
/// over component orientations; return the cheapest result. Never worse
/// than `seed` under a fresh evaluation of the objective.
pub fn orientation_search(design: &Design, seed: &Placement, obj: &mut Objective<'_>) -> Placement {
    let mut best: Option<(f64, Placement)> = None;
    for (fx, fy) in [(false, false), (true, false), (false, true), (true, true)] {
        let mut p = if fx || fy { flip(design, seed, fx, fy) } else { seed.clone() };
        let mut cost = obj.value(&p).total;
        for i in 0..design.components.len() {
            let comp = &design.components[i];
            if comp.is_fixed() {
                continue;
            }
            let pose = p.poses[i];
            let r = pose.r.toggled();
            let mut trial = p.clone();
            trial.poses[i] = centered_pose(comp.dims(r), comp.center(&pose), r);
            trial.clamp_into_board(design, i);
            let c = obj.value(&trial).total;
            if improves(c, cost) {
                cost = c;
                p = trial;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| improves(cost, *b)) {
            best = Some((cost, p));
        }
    }
    let Some((_, chosen)) = best else { return seed.clone() };
    let fresh = |p: &Placement| total_objective(design, p, obj.config, &obj.grid, &obj.pairs).total;
    if fresh(&chosen) <= fresh(seed) {
        chosen
    } else {
        seed.clone()
    }
}
