//! Momentum descent over component positions with the separators
//! alternately refreshed at frozen positions.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::design::{Design, Placement};
use crate::geometry::Point;
use crate::objective::{Objective, Terms};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpConfig {
    /// Learning rate `α`.
    pub alpha: f64,
    /// Momentum coefficient `β`, in `[0, 1)`.
    pub momentum: f64,
    /// Iteration budget `n`.
    pub iterations: usize,
    /// Relative per-iteration change of `F` below which the run counts as
    /// converged, once sustained for `window` iterations.
    pub tol: f64,
    pub window: usize,
    /// Re-solve separators every this many iterations.
    pub refresh_every: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self { alpha: 1e-3, momentum: 0.9, iterations: 5000, tol: 1e-4, window: 20, refresh_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GpError {
    InvalidConfig(&'static str),
    NonFiniteGradient { comp: String },
}

impl fmt::Display for GpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig(what) => write!(f, "invalid global placement config: {what}"),
            Self::NonFiniteGradient { comp } => write!(f, "non-finite gradient on component {comp}"),
        }
    }
}

impl core::error::Error for GpError {}

impl GpConfig {
    pub fn validate(&self) -> Result<(), GpError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(GpError::InvalidConfig("learning rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(GpError::InvalidConfig("momentum must lie in [0, 1)"));
        }
        if self.window == 0 || self.refresh_every == 0 {
            return Err(GpError::InvalidConfig("window and refresh interval must be at least 1"));
        }
        Ok(())
    }
}

/// Per-component mean of the gradients on its connected pins. Components
/// with no connected pin get zero.
pub fn component_update_matrix(design: &Design, pin_grads: &[Vec<Point>]) -> Vec<Point> {
    let mut sum = vec![Point::ZERO; design.components.len()];
    let mut count = vec![0usize; design.components.len()];
    for (net, grads) in design.nets.iter().zip(pin_grads) {
        for (pin, g) in net.pins.iter().zip(grads) {
            sum[pin.comp] += *g;
            count[pin.comp] += 1;
        }
    }
    sum.into_iter().zip(count).map(|(s, k)| if k == 0 { Point::ZERO } else { s * (1.0 / k as f64) }).collect()
}

/// One line of the optional per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub terms: Terms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpState {
    pub placement: Placement,
    pub velocity: Vec<Point>,
    pub best: Placement,
    pub best_value: f64,
    pub iteration: usize,
    /// `F` at the start of each completed step.
    pub history: Vec<f64>,
}

impl GpState {
    pub fn new(seed: Placement) -> Self {
        let n = seed.len();
        Self { best: seed.clone(), placement: seed, velocity: vec![Point::ZERO; n], best_value: f64::INFINITY, iteration: 0, history: Vec::new() }
    }
}

/// One iteration: refresh separators, evaluate `F` and its gradients at the
/// current positions, record the incumbent, then take the momentum step and
/// clamp into the board.
pub fn gp_step(state: &mut GpState, cfg: &GpConfig, obj: &mut Objective<'_>) -> Result<Terms, GpError> {
    let design = obj.design;
    let refresh = state.iteration.is_multiple_of(cfg.refresh_every);
    let (terms, grads) = obj.value_and_gradient(&state.placement, refresh);
    if terms.total < state.best_value {
        state.best_value = terms.total;
        state.best = state.placement.clone();
    }
    let p = component_update_matrix(design, &grads.pins);
    let lambda_d = obj.config.density_weight;
    for (i, comp) in design.components.iter().enumerate() {
        if comp.is_fixed() {
            state.velocity[i] = Point::ZERO;
            continue;
        }
        let g = grads.density[i] * lambda_d + p[i];
        if !g.is_finite() {
            return Err(GpError::NonFiniteGradient { comp: comp.id.clone() });
        }
        let v = state.velocity[i] * cfg.momentum - g * cfg.alpha;
        let pose = &mut state.placement.poses[i];
        let (w, h) = comp.dims(pose.r);
        let (x, y) = (pose.x + v.x, pose.y + v.y);
        pose.x = x.min(design.board.width - w).max(0.0);
        pose.y = y.min(design.board.height - h).max(0.0);
        // Projection stops motion on a clamped axis.
        state.velocity[i] = Point::new(if pose.x == x { v.x } else { 0.0 }, if pose.y == y { v.y } else { 0.0 });
    }
    state.history.push(terms.total);
    state.iteration += 1;
    Ok(terms)
}

fn converged(history: &[f64], cfg: &GpConfig) -> bool {
    if history.len() <= cfg.window {
        return false;
    }
    history[history.len() - cfg.window - 1..].windows(2).all(|w| (w[1] - w[0]).abs() <= cfg.tol * w[0].abs().max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpOutcome {
    /// Best placement seen, including the final iterate.
    pub placement: Placement,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub separator_solves: usize,
    pub history: Vec<f64>,
}

/// Iterate [`gp_step`] until `F` settles or the budget runs out and return
/// the incumbent. `trace` sees every iteration's terms.
pub fn run_global_placement(
    seed: &Placement,
    cfg: &GpConfig,
    obj: &mut Objective<'_>,
    mut trace: Option<&mut dyn FnMut(TraceRow)>,
) -> Result<GpOutcome, GpError> {
    cfg.validate()?;
    let mut state = GpState::new(seed.clone());
    state.placement.snap_fixed(obj.design);
    let mut is_converged = false;
    while state.iteration < cfg.iterations {
        let iter = state.iteration;
        let terms = gp_step(&mut state, cfg, obj)?;
        if let Some(t) = trace.as_mut() {
            t(TraceRow { iter, terms });
        }
        if converged(&state.history, cfg) {
            is_converged = true;
            break;
        }
    }
    if state.iteration > 0 {
        let last = obj.value(&state.placement).total;
        if last < state.best_value {
            state.best_value = last;
            state.best = state.placement.clone();
        }
    } else {
        state.best_value = obj.value(seed).total;
    }
    Ok(GpOutcome {
        placement: state.best,
        value: state.best_value,
        iterations: state.iteration,
        converged: is_converged,
        separator_solves: obj.separator_solves(),
        history: state.history,
    })
}
