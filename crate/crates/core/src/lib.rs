//! Placement algorithms for PCB-style boards.
//!
//! The flow runs in three stages:
//!
//! 1. [`spectral`] seeds component positions from the low eigenvectors of an
//!    area-weighted normalized Laplacian and picks orientations greedily.
//! 2. [`global`] minimizes weighted-average wirelength, a bin-density penalty
//!    and a max-margin net-separation term with momentum descent.
//! 3. [`milp`] legalizes the result with a big-M mixed-integer model, pruned by
//!    relative-position constraints read off the global placement.
//!
//! [`metrics`] evaluates any placement. The crate is `no_std` (it needs
//! `alloc`); the `parallel` feature fans separator solves out over rayon.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod design;
pub mod geometry;
pub mod global;
mod math;
pub mod metrics;
pub mod milp;
pub mod objective;
pub mod separation;
pub mod spectral;

pub use design::{Board, Component, Design, DesignError, Net, Orientation, PinDef, PinRef, Placement, Pose};
pub use geometry::{Point, Polygon, Rect};
