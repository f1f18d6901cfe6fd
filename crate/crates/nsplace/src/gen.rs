//! Seeded synthetic designs.
//!
//! Component sides are drawn log-uniformly, then every side is scaled by one
//! common factor so total component area hits the utilization target. Each
//! net gets 2 to 6 pins on distinct components chosen with probability
//! proportional to degree + 1, and every pin is a fresh point on its
//! component's perimeter.

use nsplace_core::{Board, Component, Design, Net, Orientation, PinDef, PinRef, Point, Pose, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub components: usize,
    pub nets: usize,
    /// Board size; derived from the utilization target when absent.
    pub board: Option<(f64, f64)>,
    /// Side-length range before scaling, `0 < min <= max`.
    pub dim_range: (f64, f64),
    /// Component area over board area, in `(0, 1)`.
    pub utilization: f64,
    /// Leading components locked at random non-overlapping poses.
    pub locked: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { components: 20, nets: 30, board: None, dim_range: (1.0, 10.0), utilization: 0.5, locked: 0, seed: 0 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("need at least one component")]
    NoComponents,
    #[error("dimension range must satisfy 0 < min <= max")]
    BadRange,
    #[error("cannot satisfy utilization {target}: {reason}")]
    Utilization { target: f64, reason: String },
    #[error("could not lock component {0} without overlap")]
    LockFailed(usize),
}

/// Generated lengths are multiples of 1/STEPS mm.
const STEPS: f64 = 100.0;
const GRID: f64 = 1.0 / STEPS;

// Dividing by the integer step count keeps values like 2.53 free of
// representation noise in the written file.
fn snap(v: f64) -> f64 {
    (v * STEPS).round() / STEPS
}

fn snap_up(v: f64) -> f64 {
    (v * STEPS).ceil() / STEPS
}

pub fn generate(p: &GenParams) -> Result<Design, GenError> {
    if p.components == 0 {
        return Err(GenError::NoComponents);
    }
    let (lo, hi) = p.dim_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(GenError::BadRange);
    }
    let fail = |reason: &str| GenError::Utilization { target: p.utilization, reason: reason.into() };
    if !(p.utilization > 0.0 && p.utilization < 1.0) {
        return Err(fail("target must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut side = || (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp();
    let raw: Vec<(f64, f64)> = (0..p.components).map(|_| (side(), side())).collect();
    let area: f64 = raw.iter().map(|(w, h)| w * h).sum();

    let (bw, bh, dims) = match p.board {
        Some((bw, bh)) => {
            if !(bw > 0.0 && bh > 0.0) {
                return Err(fail("board dimensions must be positive"));
            }
            let s = (p.utilization * bw * bh / area).sqrt();
            let dims: Vec<(f64, f64)> = raw.iter().map(|&(w, h)| (snap(w * s).max(GRID), snap(h * s).max(GRID))).collect();
            if dims.iter().any(|&(w, h)| w.min(h) > bw.min(bh) || w.max(h) > bw.max(bh)) {
                return Err(fail("a scaled component no longer fits on the board"));
            }
            (bw, bh, dims)
        }
        None => {
            let dims: Vec<(f64, f64)> = raw.iter().map(|&(w, h)| (snap(w).max(GRID), snap(h).max(GRID))).collect();
            let area: f64 = dims.iter().map(|(w, h)| w * h).sum();
            let widest = dims.iter().map(|&(w, h)| w.max(h)).fold(0.0, f64::max);
            let b = snap_up((area / p.utilization).sqrt());
            if b < widest {
                return Err(fail("the largest component does not fit on a square board of that size"));
            }
            (b, b, dims)
        }
    };

    let mut comps: Vec<Component> = dims
        .iter()
        .enumerate()
        .map(|(i, &(width, height))| Component { id: format!("C{i}"), width, height, fixed: None, pins: Vec::new() })
        .collect();

    let mut locked: Vec<Rect> = Vec::new();
    for (i, c) in comps.iter_mut().enumerate().take(p.locked) {
        let mut placed = false;
        for _ in 0..1000 {
            let x = snap(rng.random::<f64>() * (bw - c.width).max(0.0));
            let y = snap(rng.random::<f64>() * (bh - c.height).max(0.0));
            let r = Rect::new(x, y, c.width, c.height);
            if x + c.width <= bw && y + c.height <= bh && locked.iter().all(|o| r.overlap_area(o) == 0.0) {
                c.fixed = Some(Pose::new(x, y, Orientation::R0));
                locked.push(r);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GenError::LockFailed(i));
        }
    }

    let n = comps.len();
    let mut degree = vec![0usize; n];
    let mut nets = Vec::with_capacity(p.nets);
    for e in 0..p.nets {
        let k = rng.random_range(2..=6usize);
        let members: Vec<usize> = if n == 1 {
            vec![0; 2]
        } else {
            let mut chosen = Vec::with_capacity(k.min(n));
            while chosen.len() < k.min(n) {
                let total: usize = (0..n).filter(|c| !chosen.contains(c)).map(|c| degree[c] + 1).sum();
                let mut t = rng.random_range(0..total);
                for c in (0..n).filter(|c| !chosen.contains(c)) {
                    if t < degree[c] + 1 {
                        chosen.push(c);
                        break;
                    }
                    t -= degree[c] + 1;
                }
            }
            chosen
        };
        let mut pins = Vec::with_capacity(members.len());
        for c in members {
            degree[c] += 1;
            let comp = &mut comps[c];
            let (w, h) = (comp.width, comp.height);
            let t = rng.random::<f64>() * 2.0 * (w + h);
            let offset = if t < w {
                Point::new(t, 0.0)
            } else if t < w + h {
                Point::new(w, t - w)
            } else if t < 2.0 * w + h {
                Point::new(2.0 * w + h - t, h)
            } else {
                Point::new(0.0, 2.0 * (w + h) - t)
            };
            let offset = Point::new(snap(offset.x).clamp(0.0, w), snap(offset.y).clamp(0.0, h));
            comp.pins.push(PinDef { id: format!("P{}", comp.pins.len()), offset });
            pins.push(PinRef { comp: c, pin: comp.pins.len() - 1 });
        }
        nets.push(Net { id: format!("N{e}"), pins });
    }
    Ok(Design::new(Board { width: bw, height: bh, layers: 2 }, comps, nets).expect("generated designs are valid"))
}
