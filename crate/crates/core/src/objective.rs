//! Placement objective: weighted-average wirelength, bin density and the
//! net-separation term, with analytic gradients.

use alloc::vec;
use alloc::vec::Vec;

use crate::design::{Board, Design, Placement};
use crate::geometry::Point;
use crate::math;
use crate::separation::{ns_gradient, residual, PairSet, SeparatorCache};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveConfig {
    /// Wirelength smoothing `c`, in mm.
    pub smoothing: f64,
    pub density_weight: f64,
    pub separation_weight: f64,
}

impl ObjectiveConfig {
    /// `c` = 1% of the longer board side, unit weights.
    pub fn for_board(board: &Board) -> Self {
        Self { smoothing: 0.01 * board.max_side(), density_weight: 1.0, separation_weight: 1.0 }
    }
}

/// Weighted-average wirelength of one coordinate axis. Adds the derivative
/// with respect to each coordinate into `grad`.
///
/// Exponentials are shifted by the max (resp. min) coordinate so nothing
/// overflows however large `x / c` gets.
pub fn wa_axis(coords: &[f64], c: f64, grad: &mut [f64]) -> f64 {
    if coords.len() < 2 {
        return 0.0;
    }
    let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut sp, mut sxp, mut sn, mut sxn) = (0.0, 0.0, 0.0, 0.0);
    for &x in coords {
        let a = math::exp((x - hi) / c);
        let b = math::exp((lo - x) / c);
        sp += a;
        sxp += x * a;
        sn += b;
        sxn += x * b;
    }
    let plus = sxp / sp;
    let minus = sxn / sn;
    for (g, &x) in grad.iter_mut().zip(coords) {
        let a = math::exp((x - hi) / c);
        let b = math::exp((lo - x) / c);
        *g += a / sp * (1.0 + (x - plus) / c) - b / sn * (1.0 - (x - minus) / c);
    }
    plus - minus
}

/// Wa of one net and the gradient for each of its pins.
pub fn wa_wirelength(pins: &[Point], c: f64) -> (f64, Vec<Point>) {
    let xs: Vec<f64> = pins.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = pins.iter().map(|p| p.y).collect();
    let mut gx = vec![0.0; pins.len()];
    let mut gy = vec![0.0; pins.len()];
    let value = wa_axis(&xs, c, &mut gx) + wa_axis(&ys, c, &mut gy);
    (value, gx.into_iter().zip(gy).map(|(x, y)| Point::new(x, y)).collect())
}

/// Bell-shaped overlap of a module at distance `d` from a bin center.
pub fn theta(d: f64, bin: f64) -> f64 {
    let d = d.abs();
    if d <= 0.5 * bin {
        1.0 - 2.0 * d * d / (bin * bin)
    } else if d <= bin {
        let t = d - bin;
        2.0 * t * t / (bin * bin)
    } else {
        0.0
    }
}

/// Derivative of `theta(x - x_b)` with respect to `x`, given `delta = x - x_b`.
pub fn theta_slope(delta: f64, bin: f64) -> f64 {
    let d = delta.abs();
    let s = if delta < 0.0 { -1.0 } else { 1.0 };
    if d <= 0.5 * bin {
        -4.0 * d / (bin * bin) * s
    } else if d <= bin {
        4.0 * (d - bin) / (bin * bin) * s
    } else {
        0.0
    }
}

/// Uniform bin grid tiling the board.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub nx: usize,
    pub ny: usize,
    pub bin_w: f64,
    pub bin_h: f64,
    /// Average area per bin, `Σ w_i h_i / B`.
    pub target: f64,
}

impl DensityGrid {
    pub fn new(board: &Board, nx: usize, ny: usize, total_area: f64) -> Self {
        let nx = nx.max(1);
        let ny = ny.max(1);
        Self { nx, ny, bin_w: board.width / nx as f64, bin_h: board.height / ny as f64, target: total_area / (nx * ny) as f64 }
    }

    /// Bins of roughly `side` mm, at least two per axis.
    pub fn with_bin_size(design: &Design, side: f64) -> Self {
        let b = &design.board;
        let nx = (math::round(b.width / side) as usize).max(2);
        let ny = (math::round(b.height / side) as usize).max(2);
        Self::new(b, nx, ny, design.total_component_area())
    }

    /// Bin side twice the mean component dimension.
    pub fn default_for(design: &Design) -> Self {
        let n = design.components.len();
        let side = if n == 0 {
            design.board.max_side()
        } else {
            2.0 * design.components.iter().map(|c| c.width + c.height).sum::<f64>() / (2 * n) as f64
        };
        Self::with_bin_size(design, side)
    }

    pub fn bins(&self) -> usize {
        self.nx * self.ny
    }

    pub fn bin_center(&self, ix: usize, iy: usize) -> Point {
        Point::new((ix as f64 + 0.5) * self.bin_w, (iy as f64 + 0.5) * self.bin_h)
    }

    /// `Θ_x · Θ_y` between a bin and a module centered at `center`.
    pub fn bin_overlap(&self, ix: usize, iy: usize, center: Point) -> f64 {
        let b = self.bin_center(ix, iy);
        theta(center.x - b.x, self.bin_w) * theta(center.y - b.y, self.bin_h)
    }

    // Bin index ranges that can have nonzero overlap with `center`.
    fn reach(&self, center: Point) -> (core::ops::Range<usize>, core::ops::Range<usize>) {
        let span = |c: f64, w: f64, n: usize| {
            let lo = math::floor(c / w - 1.5).max(0.0) as usize;
            let hi = (math::ceil(c / w + 0.5).max(0.0) as usize).min(n);
            lo.min(hi)..hi
        };
        (span(center.x, self.bin_w, self.nx), span(center.y, self.bin_h, self.ny))
    }

    /// Normalization `C_i` such that the module's overlaps sum to `area`.
    pub fn normalization(&self, center: Point, area: f64) -> f64 {
        let (rx, ry) = self.reach(center);
        let mut sum = 0.0;
        for ix in rx {
            for iy in ry.clone() {
                sum += self.bin_overlap(ix, iy, center);
            }
        }
        if sum > 0.0 {
            area / sum
        } else {
            0.0
        }
    }
}

/// Density value, per-component gradient (w.r.t. position) and the
/// normalization factors used.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEval {
    pub value: f64,
    pub gradient: Vec<Point>,
    pub norms: Vec<f64>,
}

/// Bin density penalty `Σ_b (D_b − target)²`, normalizations recomputed at
/// the current positions.
pub fn density_cost(design: &Design, placement: &Placement, grid: &DensityGrid) -> DensityEval {
    let norms = design
        .components
        .iter()
        .zip(&placement.poses)
        .map(|(c, pose)| grid.normalization(c.center(pose), c.area()))
        .collect();
    density_cost_with_norms(design, placement, grid, norms)
}

/// Same as [`density_cost`] with caller-supplied normalizations, which are
/// held constant in the gradient.
pub fn density_cost_with_norms(design: &Design, placement: &Placement, grid: &DensityGrid, norms: Vec<f64>) -> DensityEval {
    let centers: Vec<Point> = design.components.iter().zip(&placement.poses).map(|(c, p)| c.center(p)).collect();
    let mut bins = vec![0.0; grid.bins()];
    for (center, &norm) in centers.iter().zip(&norms) {
        let (rx, ry) = grid.reach(*center);
        for ix in rx {
            for iy in ry.clone() {
                bins[ix * grid.ny + iy] += norm * grid.bin_overlap(ix, iy, *center);
            }
        }
    }
    let value = bins.iter().map(|d| (d - grid.target) * (d - grid.target)).sum();
    let gradient = centers
        .iter()
        .zip(&norms)
        .map(|(center, &norm)| {
            let (rx, ry) = grid.reach(*center);
            let mut g = Point::ZERO;
            for ix in rx {
                for iy in ry.clone() {
                    let b = grid.bin_center(ix, iy);
                    let (dx, dy) = (center.x - b.x, center.y - b.y);
                    let excess = 2.0 * (bins[ix * grid.ny + iy] - grid.target) * norm;
                    g.x += excess * theta_slope(dx, grid.bin_w) * theta(dy, grid.bin_h);
                    g.y += excess * theta(dx, grid.bin_w) * theta_slope(dy, grid.bin_h);
                }
            }
            g
        })
        .collect();
    DensityEval { value, gradient, norms }
}

/// Value of each term of the composite objective.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Terms {
    pub wirelength: f64,
    pub separation: f64,
    pub density: f64,
    pub total: f64,
}

/// Gradients at one placement: per net and pin for the pin-level terms
/// (wirelength plus weighted separation), per component for density.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub pins: Vec<Vec<Point>>,
    pub density: Vec<Point>,
}

/// Evaluator for `F = Σ Wa + λ_NS·Ns + λ_D·D`. Keeps the separator warm-start
/// cache between calls.
#[derive(Debug, Clone)]
pub struct Objective<'d> {
    pub design: &'d Design,
    pub config: ObjectiveConfig,
    pub grid: DensityGrid,
    pub pairs: PairSet,
    cache: SeparatorCache,
}

impl<'d> Objective<'d> {
    pub fn new(design: &'d Design, config: ObjectiveConfig, grid: DensityGrid, pairs: PairSet) -> Self {
        let cache = SeparatorCache::new(&pairs);
        Self { design, config, grid, pairs, cache }
    }

    pub fn separator_solves(&self) -> usize {
        self.cache.solves()
    }

    pub fn cache(&self) -> &SeparatorCache {
        &self.cache
    }

    fn separation_active(&self) -> bool {
        self.config.separation_weight > 0.0 && !self.pairs.is_empty()
    }

    /// Evaluate all terms, refreshing separators when the term is active.
    pub fn value(&mut self, placement: &Placement) -> Terms {
        let pins = self.design.all_net_pins(placement);
        let wirelength = pins.iter().map(|p| wa_wirelength(p, self.config.smoothing).0).sum();
        let separation = if self.separation_active() {
            self.cache.refresh(&self.pairs, &pins);
            self.cache.mean_residual()
        } else {
            0.0
        };
        let density = if self.config.density_weight > 0.0 { density_cost(self.design, placement, &self.grid).value } else { 0.0 };
        self.combine(wirelength, separation, density)
    }

    /// Terms and gradients. With `refresh_separators == false` the cached
    /// separators from the last refresh are reused as-is.
    pub fn value_and_gradient(&mut self, placement: &Placement, refresh_separators: bool) -> (Terms, Gradients) {
        let net_pins = self.design.all_net_pins(placement);
        let mut wirelength = 0.0;
        let mut pin_grads: Vec<Vec<Point>> = net_pins
            .iter()
            .map(|p| {
                let (v, g) = wa_wirelength(p, self.config.smoothing);
                wirelength += v;
                g
            })
            .collect();

        let mut separation = 0.0;
        if self.separation_active() {
            if refresh_separators || self.cache.separators().iter().all(Option::is_none) {
                self.cache.refresh(&self.pairs, &net_pins);
                separation = self.cache.mean_residual();
            } else {
                // Stale separators re-scored at the current pins; an upper
                // bound on the freshly solved value.
                let sum: f64 = self
                    .pairs
                    .pairs
                    .iter()
                    .zip(self.cache.separators())
                    .map(|(&(e, f), s)| s.map_or(0.0, |s| residual(&net_pins[e], &net_pins[f], s.u, s.gamma)))
                    .sum();
                separation = sum / self.pairs.len() as f64;
            }
            let scale = self.config.separation_weight / self.pairs.len() as f64;
            for (&(e, f), sep) in self.pairs.pairs.iter().zip(self.cache.separators()) {
                let Some(sep) = sep else { continue };
                let (ge, gf) = ns_gradient(&net_pins[e], &net_pins[f], sep);
                for (acc, g) in pin_grads[e].iter_mut().zip(ge) {
                    *acc += g * scale;
                }
                for (acc, g) in pin_grads[f].iter_mut().zip(gf) {
                    *acc += g * scale;
                }
            }
        }

        let (density, density_grad) = if self.config.density_weight > 0.0 {
            let eval = density_cost(self.design, placement, &self.grid);
            (eval.value, eval.gradient)
        } else {
            (0.0, vec![Point::ZERO; self.design.components.len()])
        };
        (self.combine(wirelength, separation, density), Gradients { pins: pin_grads, density: density_grad })
    }

    fn combine(&self, wirelength: f64, separation: f64, density: f64) -> Terms {
        let total = wirelength + self.config.separation_weight * separation + self.config.density_weight * density;
        Terms { wirelength, separation, density, total }
    }
}

/// One-shot composite objective with fresh separator solves.
pub fn total_objective(design: &Design, placement: &Placement, config: ObjectiveConfig, grid: &DensityGrid, pairs: &PairSet) -> Terms {
    let mut obj = Objective::new(design, config, grid.clone(), pairs.clone());
    obj.value(placement)
}
