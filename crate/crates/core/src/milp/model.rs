use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::lp::{LinearProgram, Sense};
use crate::design::{Design, Orientation, Placement, Pose};
use crate::geometry::{rect_gap, Point, Rect};

/// Where component `i` sits relative to component `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
    Under,
    Over,
}

impl Direction {
    /// The same relation seen from `j`.
    pub fn mirrored(self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
            Self::Under => Self::Over,
            Self::Over => Self::Under,
        }
    }

    /// `(p, q)` values that select this direction in the big-M rows.
    pub fn encoding(self) -> (f64, f64) {
        match self {
            Self::Left => (0.0, 0.0),
            Self::Under => (0.0, 1.0),
            Self::Right => (1.0, 0.0),
            Self::Over => (1.0, 1.0),
        }
    }

    pub const ALL: [Direction; 4] = [Self::Left, Self::Under, Self::Right, Self::Over];
}

/// `i` lies in `direction` of `j`; always stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelConstraint {
    pub i: usize,
    pub j: usize,
    pub direction: Direction,
}

impl RelConstraint {
    pub fn new(i: usize, j: usize, direction: Direction) -> Self {
        if i < j {
            Self { i, j, direction }
        } else {
            Self { i: j, j: i, direction: direction.mirrored() }
        }
    }

    /// Whether `placement` honors the constraint.
    pub fn holds(&self, design: &Design, placement: &Placement, tol: f64) -> bool {
        let a = design.footprint(placement, self.i);
        let b = design.footprint(placement, self.j);
        match self.direction {
            Direction::Left => a.right() <= b.x + tol,
            Direction::Right => b.right() <= a.x + tol,
            Direction::Under => a.top() <= b.y + tol,
            Direction::Over => b.top() <= a.y + tol,
        }
    }
}

/// Sweeps of single-pair axis flips when repairing a warm hint.
const HINT_REPAIR_PASSES: usize = 50;
/// Tabu steps after the repair sweeps stall, and how many steps a changed
/// pair stays frozen.
const HINT_TABU_STEPS: usize = 400;
const HINT_TABU_TENURE: usize = 10;

/// Default pruning threshold: 5% of the longer board side.
pub fn default_threshold(design: &Design) -> f64 {
    0.05 * design.board.max_side()
}

/// Pin a relative position on every pair (at least one movable) whose
/// footprints are apart by at least `k` along some axis. The wider gap picks
/// the axis, horizontal on ties, and the current order picks the direction.
pub fn derive_relative_constraints(placement: &Placement, design: &Design, k: f64) -> Vec<RelConstraint> {
    let n = design.components.len();
    let rects: Vec<_> = (0..n).map(|i| design.footprint(placement, i)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if design.components[i].is_fixed() && design.components[j].is_fixed() {
                continue;
            }
            let (dx, dy) = rect_gap(&rects[i], &rects[j]);
            if dx.max(dy) < k {
                continue;
            }
            let (ci, cj) = (rects[i].center(), rects[j].center());
            let direction = if dx >= dy {
                if ci.x <= cj.x { Direction::Left } else { Direction::Right }
            } else if ci.y <= cj.y {
                Direction::Under
            } else {
                Direction::Over
            };
            out.push(RelConstraint { i, j, direction });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompVars {
    pub x: usize,
    pub y: usize,
    pub r: usize,
}

/// Non-overlap bookkeeping for one pair with `i < j`. Pruned pairs carry
/// their direction and no binaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairVars {
    pub i: usize,
    pub j: usize,
    pub pq: Option<(usize, usize)>,
    pub fixed: Option<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetVars {
    pub ux: usize,
    pub lx: usize,
    pub uy: usize,
    pub ly: usize,
}

/// The legalization MILP: `min Σ hpwl + (max hpwl − min hpwl)` over
/// positions, orientation bits and pair-direction bits.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub lp: LinearProgram,
    pub names: Vec<String>,
    /// Indices of 0/1 variables, ascending.
    pub binaries: Vec<usize>,
    pub comps: Vec<CompVars>,
    pub pairs: Vec<PairVars>,
    pub nets: Vec<NetVars>,
    /// `(hmax, hmin)`, present when the design has nets.
    pub range: Option<(usize, usize)>,
    /// Unrotated component dimensions.
    pub dims: Vec<(f64, f64)>,
    /// Locked poses, copied verbatim into extracted placements.
    pub fixed: Vec<Option<Pose>>,
    pub board: (f64, f64),
}

struct Builder {
    lp: LinearProgram,
    names: Vec<String>,
}

impl Builder {
    fn var(&mut self, name: String, cost: f64, lower: f64, upper: f64) -> usize {
        self.names.push(name);
        self.lp.add_var(cost, lower, upper)
    }
}

/// Assemble the model. Each constraint in `rels` replaces its pair's four
/// big-M rows with the one plain row of its direction.
pub fn build_model(design: &Design, rels: &[RelConstraint]) -> MilpModel {
    let (bw, bh) = (design.board.width, design.board.height);
    let mut b = Builder { lp: LinearProgram::default(), names: Vec::new() };
    let mut binaries = Vec::new();
    let mut comps = Vec::with_capacity(design.components.len());
    for (i, c) in design.components.iter().enumerate() {
        let x = b.var(format!("x_{i}"), 0.0, 0.0, bw);
        let y = b.var(format!("y_{i}"), 0.0, 0.0, bh);
        let r = b.var(format!("r_{i}"), 0.0, 0.0, 1.0);
        if !c.is_fixed() {
            binaries.push(r);
        }
        comps.push(CompVars { x, y, r });
    }

    let mut nets = Vec::with_capacity(design.nets.len());
    for (e, _) in design.nets.iter().enumerate() {
        let ux = b.var(format!("ux_{e}"), 1.0, 0.0, bw);
        let lx = b.var(format!("lx_{e}"), -1.0, 0.0, bw);
        let uy = b.var(format!("uy_{e}"), 1.0, 0.0, bh);
        let ly = b.var(format!("ly_{e}"), -1.0, 0.0, bh);
        nets.push(NetVars { ux, lx, uy, ly });
    }
    let range = if design.nets.is_empty() {
        None
    } else {
        let hmax = b.var("hmax".into(), 1.0, 0.0, bw + bh);
        let hmin = b.var("hmin".into(), -1.0, 0.0, bw + bh);
        Some((hmax, hmin))
    };

    let n = design.components.len();
    let mut rel_of = vec![None; n * n];
    for rel in rels {
        rel_of[rel.i * n + rel.j] = Some(rel.direction);
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if design.components[i].is_fixed() && design.components[j].is_fixed() {
                continue;
            }
            let fixed = rel_of[i * n + j];
            let pq = if fixed.is_none() {
                let p = b.var(format!("p_{i}_{j}"), 0.0, 0.0, 1.0);
                let q = b.var(format!("q_{i}_{j}"), 0.0, 0.0, 1.0);
                binaries.push(p);
                binaries.push(q);
                Some((p, q))
            } else {
                None
            };
            pairs.push(PairVars { i, j, pq, fixed });
        }
    }

    let lp = &mut b.lp;
    for (c, v) in design.components.iter().zip(&comps) {
        let (w, h) = (c.width, c.height);
        match c.fixed {
            Some(pose) => {
                lp.add_row(vec![(v.x, 1.0)], Sense::Eq, pose.x);
                lp.add_row(vec![(v.y, 1.0)], Sense::Eq, pose.y);
                lp.add_row(vec![(v.r, 1.0)], Sense::Eq, f64::from(pose.r.bit()));
            }
            None => {
                lp.add_row(vec![(v.x, 1.0), (v.r, h - w)], Sense::Le, bw - w);
                lp.add_row(vec![(v.y, 1.0), (v.r, w - h)], Sense::Le, bh - h);
            }
        }
    }

    for pair in &pairs {
        let (ci, cj) = (&design.components[pair.i], &design.components[pair.j]);
        let (vi, vj) = (comps[pair.i], comps[pair.j]);
        let (wi, hi, wj, hj) = (ci.width, ci.height, cj.width, cj.height);
        match (pair.fixed, pair.pq) {
            (Some(Direction::Left), _) => {
                lp.add_row(vec![(vi.x, 1.0), (vj.x, -1.0), (vi.r, hi - wi)], Sense::Le, -wi);
            }
            (Some(Direction::Under), _) => {
                lp.add_row(vec![(vi.y, 1.0), (vj.y, -1.0), (vi.r, wi - hi)], Sense::Le, -hi);
            }
            (Some(Direction::Right), _) => {
                lp.add_row(vec![(vi.x, 1.0), (vj.x, -1.0), (vj.r, -(hj - wj))], Sense::Ge, wj);
            }
            (Some(Direction::Over), _) => {
                lp.add_row(vec![(vi.y, 1.0), (vj.y, -1.0), (vj.r, -(wj - hj))], Sense::Ge, hj);
            }
            (None, Some((p, q))) => {
                lp.add_row(vec![(vi.x, 1.0), (vj.x, -1.0), (vi.r, hi - wi), (p, -bw), (q, -bw)], Sense::Le, -wi);
                lp.add_row(vec![(vi.y, 1.0), (vj.y, -1.0), (vi.r, wi - hi), (p, -bh), (q, bh)], Sense::Le, bh - hi);
                lp.add_row(vec![(vi.x, 1.0), (vj.x, -1.0), (vj.r, -(hj - wj)), (p, -bw), (q, bw)], Sense::Ge, wj - bw);
                lp.add_row(vec![(vi.y, 1.0), (vj.y, -1.0), (vj.r, -(wj - hj)), (p, -bh), (q, -bh)], Sense::Ge, hj - 2.0 * bh);
            }
            (None, None) => unreachable!("unpruned pair without binaries"),
        }
    }

    // Pin coordinates are affine in (x, y, r):
    //   px = x + ox + r (h − oy − ox),  py = y + oy + r (ox − oy).
    for (net, nv) in design.nets.iter().zip(&nets) {
        for pin in &net.pins {
            let c = &design.components[pin.comp];
            let v = comps[pin.comp];
            let o = c.pins[pin.pin].offset;
            let rx = c.height - o.y - o.x;
            let ry = o.x - o.y;
            lp.add_row(vec![(nv.ux, 1.0), (v.x, -1.0), (v.r, -rx)], Sense::Ge, o.x);
            lp.add_row(vec![(nv.lx, 1.0), (v.x, -1.0), (v.r, -rx)], Sense::Le, o.x);
            lp.add_row(vec![(nv.uy, 1.0), (v.y, -1.0), (v.r, -ry)], Sense::Ge, o.y);
            lp.add_row(vec![(nv.ly, 1.0), (v.y, -1.0), (v.r, -ry)], Sense::Le, o.y);
        }
    }
    if let Some((hmax, hmin)) = range {
        for nv in &nets {
            let hpwl = [(nv.ux, -1.0), (nv.lx, 1.0), (nv.uy, -1.0), (nv.ly, 1.0)];
            let mut upper = vec![(hmax, 1.0)];
            upper.extend_from_slice(&hpwl);
            lp.add_row(upper, Sense::Ge, 0.0);
            let mut lower = vec![(hmin, 1.0)];
            lower.extend_from_slice(&hpwl);
            lp.add_row(lower, Sense::Le, 0.0);
        }
    }

    binaries.sort_unstable();
    MilpModel {
        lp: b.lp,
        names: b.names,
        binaries,
        comps,
        pairs,
        nets,
        range,
        dims: design.components.iter().map(|c| (c.width, c.height)).collect(),
        fixed: design.components.iter().map(|c| c.fixed).collect(),
        board: (bw, bh),
    }
}

impl MilpModel {
    /// Placement read off a solution vector; orientation bits are rounded
    /// and positions clamped onto the board against rounding noise.
    pub fn placement_from_values(&self, values: &[f64]) -> Placement {
        let poses = self
            .comps
            .iter()
            .zip(&self.dims)
            .zip(&self.fixed)
            .map(|((v, &(w, h)), fixed)| {
                if let Some(pose) = fixed {
                    return *pose;
                }
                let r = if values[v.r] >= 0.5 { Orientation::R90 } else { Orientation::R0 };
                let (ew, eh) = if r == Orientation::R90 { (h, w) } else { (w, h) };
                let x = values[v.x].min(self.board.0 - ew).max(0.0);
                let y = values[v.y].min(self.board.1 - eh).max(0.0);
                Pose::new(x, y, r)
            })
            .collect();
        Placement::new(poses)
    }

    pub fn footprint(&self, placement: &Placement, i: usize) -> Rect {
        let pose = placement.poses[i];
        let (w, h) = self.dims[i];
        let (w, h) = if pose.r == Orientation::R90 { (h, w) } else { (w, h) };
        Rect::new(pose.x, pose.y, w, h)
    }

    /// Binary values read off `placement`: its orientations and, per
    /// unpruned pair, the direction with the most slack. Other entries are 0.
    pub fn binary_hint(&self, placement: &Placement) -> Vec<f64> {
        let mut v = vec![0.0; self.lp.num_vars()];
        for (cv, pose) in self.comps.iter().zip(&placement.poses) {
            v[cv.r] = f64::from(pose.r.bit());
        }
        for pair in &self.pairs {
            if let Some((p, q)) = pair.pq {
                let a = self.footprint(placement, pair.i);
                let b = self.footprint(placement, pair.j);
                let (pv, qv) = best_direction(&a, &b).encoding();
                v[p] = pv;
                v[q] = qv;
            }
        }
        v
    }

    /// Warm-start binaries for a possibly overlapping `placement`.
    ///
    /// Every unpruned pair first takes the direction that agrees with the
    /// placement's center order on the axis where it overlaps least. A
    /// repair pass then tries each pair's other three directions, keeping
    /// any change that leaves both relation graphs acyclic and lowers the
    /// summed overrun of the tightest packing. If overrun remains, a second
    /// greedy start lets each pair switch to center order on the other axis
    /// when its own chain would overrun, and the better start wins. The hint
    /// is feasible for the model exactly when that overrun is zero.
    pub fn warm_hint(&self, placement: &Placement) -> Vec<f64> {
        let mut v = self.binary_hint(placement);
        let n = self.comps.len();
        let rects: Vec<Rect> = (0..n).map(|i| self.footprint(placement, i)).collect();
        let mut base = Relations::new(&rects, &self.fixed, self.board);
        let mut free = Vec::new();
        for pair in &self.pairs {
            match (pair.fixed, pair.pq) {
                (Some(d), _) => base.add(pair.i, pair.j, d),
                (None, Some(pq)) => {
                    let (a, b) = (&rects[pair.i], &rects[pair.j]);
                    let d = best_direction(a, b);
                    free.push((-rect_slack(a, b, d), pair.i, pair.j, d, pq));
                }
                (None, None) => {}
            }
        }
        // Most overlapped pairs choose first.
        free.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
        let pairs: Vec<(usize, usize, Direction)> = free.iter().map(|&(_, i, j, d, _)| (i, j, d)).collect();
        let (cost, chosen) = hint_search(base.clone(), &pairs, false);
        let chosen = if cost > 0.0 {
            let (alt_cost, alt) = hint_search(base, &pairs, true);
            if alt_cost < cost {
                alt
            } else {
                chosen
            }
        } else {
            chosen
        };
        for (&(_, _, _, _, (p, q)), d) in free.iter().zip(chosen) {
            let (pv, qv) = d.encoding();
            v[p] = pv;
            v[q] = qv;
        }
        v
    }

    /// Full variable assignment for `placement`, with net and range
    /// variables at their tightest values.
    pub fn assignment(&self, design: &Design, placement: &Placement) -> Vec<f64> {
        let mut v = self.binary_hint(placement);
        for (cv, pose) in self.comps.iter().zip(&placement.poses) {
            v[cv.x] = pose.x;
            v[cv.y] = pose.y;
        }
        let mut hpwls = Vec::with_capacity(self.nets.len());
        for (e, nv) in self.nets.iter().enumerate() {
            let pins = design.net_pins(placement, e);
            let (mut lo, mut hi) = (pins[0], pins[0]);
            for p in &pins {
                lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            v[nv.ux] = hi.x;
            v[nv.lx] = lo.x;
            v[nv.uy] = hi.y;
            v[nv.ly] = lo.y;
            hpwls.push(hi.x - lo.x + hi.y - lo.y);
        }
        if let Some((hmax, hmin)) = self.range {
            v[hmax] = hpwls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            v[hmin] = hpwls.iter().copied().fold(f64::INFINITY, f64::min);
        }
        v
    }
}

fn rect_slack(a: &Rect, b: &Rect, d: Direction) -> f64 {
    match d {
        Direction::Left => b.x - a.right(),
        Direction::Right => a.x - b.right(),
        Direction::Under => b.y - a.top(),
        Direction::Over => a.y - b.top(),
    }
}

/// The direction of `a` relative to `b` that is violated least, by gap.
/// Left beats Right exactly when `a`'s center is left of `b`'s (ties go to
/// Left), and likewise Under beats Over.
pub fn best_direction(a: &Rect, b: &Rect) -> Direction {
    let mut best = Direction::Left;
    for d in Direction::ALL {
        if rect_slack(a, b, d) > rect_slack(a, b, best) {
            best = d;
        }
    }
    best
}

/// Greedy direction choice over `pairs` (in priority order), improving
/// repair passes, then a tabu search over single-pair changes if overrun
/// remains. Returns the best overrun seen and its directions.
fn hint_search(mut g: Relations, pairs: &[(usize, usize, Direction)], switch_axis: bool) -> (f64, Vec<Direction>) {
    let mut chosen = Vec::with_capacity(pairs.len());
    for &(i, j, natural) in pairs {
        let d = if switch_axis {
            let other = g.ordered(i, j, is_horizontal(natural));
            let keep = g.cost_with(i, j, natural);
            if keep == 0.0 || keep <= g.cost_with(i, j, other) {
                natural
            } else {
                other
            }
        } else {
            natural
        };
        g.add(i, j, d);
        chosen.push(d);
    }
    let mut current = g.overrun().unwrap_or(f64::INFINITY);
    for _ in 0..HINT_REPAIR_PASSES {
        if current <= 0.0 {
            break;
        }
        let mut improved = false;
        for (k, &(i, j, _)) in pairs.iter().enumerate() {
            g.remove(i, j, chosen[k]);
            for d in Direction::ALL {
                if d == chosen[k] {
                    continue;
                }
                let c = g.cost_with(i, j, d);
                if c < current - 1e-12 {
                    current = c;
                    chosen[k] = d;
                    improved = true;
                }
            }
            g.add(i, j, chosen[k]);
        }
        if !improved {
            break;
        }
    }
    if current <= 0.0 || pairs.is_empty() {
        return (current, chosen);
    }

    // Each step takes the best change among pairs not changed in the last
    // HINT_TABU_TENURE steps, worsening or not; a change that beats the best
    // overrun seen is always allowed.
    let mut best = (current, chosen.clone());
    let mut changed_at = vec![usize::MAX; pairs.len()];
    for step in 0..HINT_TABU_STEPS {
        let mut pick: Option<(f64, usize, Direction)> = None;
        for (k, &(i, j, _)) in pairs.iter().enumerate() {
            let tabu = changed_at[k] != usize::MAX && step - changed_at[k] <= HINT_TABU_TENURE;
            g.remove(i, j, chosen[k]);
            for d in Direction::ALL {
                if d == chosen[k] {
                    continue;
                }
                let c = g.cost_with(i, j, d);
                if (!tabu || c < best.0 - 1e-12) && c.is_finite() && pick.is_none_or(|(pc, _, _)| c < pc) {
                    pick = Some((c, k, d));
                }
            }
            g.add(i, j, chosen[k]);
        }
        let Some((c, k, d)) = pick else { break };
        let (i, j, _) = pairs[k];
        g.remove(i, j, chosen[k]);
        g.add(i, j, d);
        chosen[k] = d;
        changed_at[k] = step;
        if c < best.0 - 1e-12 {
            best = (c, chosen.clone());
            if c <= 0.0 {
                break;
            }
        }
    }
    best
}

fn is_horizontal(d: Direction) -> bool {
    matches!(d, Direction::Left | Direction::Right)
}

/// Pairwise separation relations as two graphs, one per axis. An edge
/// `a -> b` means `a` ends before `b` starts along that axis.
#[derive(Clone)]
struct Relations {
    /// Component extents per axis.
    size: [Vec<f64>; 2],
    /// Footprint centers per axis, for center-order choices.
    key: [Vec<f64>; 2],
    /// Locked coordinates per axis.
    locked: [Vec<Option<f64>>; 2],
    preds: [Vec<Vec<usize>>; 2],
    bound: [f64; 2],
}

impl Relations {
    fn new(rects: &[Rect], fixed: &[Option<Pose>], board: (f64, f64)) -> Self {
        let n = rects.len();
        let locked = |f: fn(&Rect) -> f64| rects.iter().zip(fixed).map(|(r, p)| p.map(|_| f(r))).collect::<Vec<_>>();
        Self {
            size: [rects.iter().map(|r| r.w).collect(), rects.iter().map(|r| r.h).collect()],
            key: [rects.iter().map(|r| r.center().x).collect(), rects.iter().map(|r| r.center().y).collect()],
            locked: [locked(|r| r.x), locked(|r| r.y)],
            preds: [vec![Vec::new(); n], vec![Vec::new(); n]],
            bound: [board.0, board.1],
        }
    }

    /// The relation between `i` and `j` on one axis that follows center
    /// order, ties to the lower index.
    fn ordered(&self, i: usize, j: usize, vertical: bool) -> Direction {
        let key = &self.key[usize::from(vertical)];
        match (vertical, (key[i], i) < (key[j], j)) {
            (false, true) => Direction::Left,
            (false, false) => Direction::Right,
            (true, true) => Direction::Under,
            (true, false) => Direction::Over,
        }
    }

    /// Axis index and edge of `i` in direction `d` of `j`.
    fn edge(i: usize, j: usize, d: Direction) -> (usize, usize, usize) {
        match d {
            Direction::Left => (0, i, j),
            Direction::Right => (0, j, i),
            Direction::Under => (1, i, j),
            Direction::Over => (1, j, i),
        }
    }

    fn add(&mut self, i: usize, j: usize, d: Direction) {
        let (axis, from, to) = Self::edge(i, j, d);
        self.preds[axis][to].push(from);
    }

    fn remove(&mut self, i: usize, j: usize, d: Direction) {
        let (axis, from, to) = Self::edge(i, j, d);
        if let Some(k) = self.preds[axis][to].iter().rposition(|&p| p == from) {
            self.preds[axis][to].swap_remove(k);
        }
    }

    /// Summed overrun of the tightest packing along one axis: how far each
    /// component ends past the board, plus how far each locked component is
    /// pushed past its coordinate. `None` on a cycle.
    fn axis_overrun(&self, axis: usize) -> Option<f64> {
        let preds = &self.preds[axis];
        let n = preds.len();
        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut succs = vec![Vec::new(); n];
        for (to, ps) in preds.iter().enumerate() {
            for &from in ps {
                succs[from].push(to);
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&k| indegree[k] == 0).collect();
        let mut start = vec![0.0f64; n];
        let mut total = 0.0;
        let mut seen = 0;
        while let Some(k) = ready.pop() {
            seen += 1;
            let s = preds[k].iter().map(|&p| start[p] + self.size[axis][p]).fold(0.0, f64::max);
            start[k] = match self.locked[axis][k] {
                Some(at) => {
                    total += (s - at).max(0.0);
                    at
                }
                None => s,
            };
            total += (start[k] + self.size[axis][k] - self.bound[axis]).max(0.0);
            for &t in &succs[k] {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    ready.push(t);
                }
            }
        }
        (seen == n).then_some(total)
    }

    fn overrun(&self) -> Option<f64> {
        Some(self.axis_overrun(0)? + self.axis_overrun(1)?)
    }

    /// Total overrun with one more relation, infinite on a cycle.
    fn cost_with(&mut self, i: usize, j: usize, d: Direction) -> f64 {
        self.add(i, j, d);
        let c = self.overrun().unwrap_or(f64::INFINITY);
        self.remove(i, j, d);
        c
    }
}
