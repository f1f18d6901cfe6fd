//! Legalization as a mixed-integer program.
//!
//! Positions are continuous, orientations and pairwise relative directions
//! are binary. Pairs already far apart in the global placement get their
//! direction pinned up front, which removes their binaries.

mod bnb;
pub mod lp;
mod model;

pub use bnb::{branch_and_bound, BnbConfig, BnbResult, Clock, MilpStatus, NoClock};
pub use model::{
    best_direction, build_model, default_threshold, derive_relative_constraints, CompVars, Direction, MilpModel, NetVars, PairVars,
    RelConstraint,
};

use alloc::vec::Vec;

use crate::design::{Design, Placement};

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub placement: Option<Placement>,
    pub objective: f64,
    pub status: MilpStatus,
    pub nodes: usize,
    pub pivots: usize,
}

/// Solve `model`, seeding the incumbent from `warm` when given (see
/// [`MilpModel::warm_hint`]).
pub fn solve_milp(model: &MilpModel, cfg: &BnbConfig, warm: Option<&Placement>, clock: &dyn Clock) -> MilpSolution {
    let hint = warm.map(|p| model.warm_hint(p));
    let r = branch_and_bound(&model.lp, &model.binaries, cfg, clock, hint.as_deref());
    MilpSolution { placement: r.values.as_deref().map(|v| model.placement_from_values(v)), objective: r.objective, status: r.status, nodes: r.nodes, pivots: r.pivots }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Legalized {
    pub solution: MilpSolution,
    pub constraints: Vec<RelConstraint>,
    pub binaries: usize,
}

/// Derive relative constraints from `gp` at threshold `k` (`None` skips the
/// pruning), build the model and solve it warm-started from `gp`.
pub fn legalize(design: &Design, gp: &Placement, k: Option<f64>, cfg: &BnbConfig, clock: &dyn Clock) -> Legalized {
    let constraints = match k {
        Some(k) => derive_relative_constraints(gp, design, k),
        None => Vec::new(),
    };
    let model = build_model(design, &constraints);
    let solution = solve_milp(&model, cfg, Some(gp), clock);
    Legalized { solution, binaries: model.binaries.len(), constraints }
}
