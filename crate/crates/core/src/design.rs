//! Boards, components, pins, nets and placements.
//!
//! A component's position is its lower-left corner. Orientation is a single
//! bit: [`Orientation::R90`] rotates the footprint 90° counterclockwise about
//! that corner and shifts it right by the original height, so the rotated
//! footprint occupies `[x, x + h] × [y, y + w]`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{Point, Rect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Board {
    pub width: f64,
    pub height: f64,
    /// Routing layers. Carried through but unused by the placement math.
    pub layers: u32,
}

impl Board {
    pub fn rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn max_side(&self) -> f64 {
        self.width.max(self.height)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * self.width, 0.5 * self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub enum Orientation {
    #[default]
    R0,
    R90,
}

impl Orientation {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Self::R0),
            1 => Some(Self::R90),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Self::R0 => 0,
            Self::R90 => 1,
        }
    }

    pub fn toggled(self) -> Self {
        match self {
            Self::R0 => Self::R90,
            Self::R90 => Self::R0,
        }
    }
}

/// Position and orientation of one component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub r: Orientation,
}

impl Pose {
    pub const fn new(x: f64, y: f64, r: Orientation) -> Self {
        Self { x, y, r }
    }

    pub fn origin(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinDef {
    pub id: String,
    /// Offset from the lower-left corner in the unrotated frame.
    pub offset: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: String,
    pub width: f64,
    pub height: f64,
    /// Locked pose, if the component is fixed.
    pub fixed: Option<Pose>,
    pub pins: Vec<PinDef>,
}

impl Component {
    pub fn is_fixed(&self) -> bool {
        self.fixed.is_some()
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Footprint extent `(w, h)` under the given orientation.
    pub fn dims(&self, r: Orientation) -> (f64, f64) {
        match r {
            Orientation::R0 => (self.width, self.height),
            Orientation::R90 => (self.height, self.width),
        }
    }

    pub fn footprint(&self, pose: &Pose) -> Rect {
        let (w, h) = self.dims(pose.r);
        Rect::new(pose.x, pose.y, w, h)
    }

    pub fn center(&self, pose: &Pose) -> Point {
        self.footprint(pose).center()
    }

    pub fn pin_index(&self, id: &str) -> Option<usize> {
        self.pins.iter().position(|p| p.id == id)
    }
}

/// Absolute pin position for a component placed at `pose`.
pub fn pin_position(pose: &Pose, comp: &Component, pin: &PinDef) -> Point {
    let o = pin.offset;
    match pose.r {
        Orientation::R0 => Point::new(pose.x + o.x, pose.y + o.y),
        Orientation::R90 => Point::new(pose.x + comp.height - o.y, pose.y + o.x),
    }
}

/// A pin reference resolved to indices into [`Design::components`] and the
/// component's pin list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PinRef {
    pub comp: usize,
    pub pin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub id: String,
    pub pins: Vec<PinRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DesignError {
    NonPositiveBoard { width: f64, height: f64 },
    NonPositiveDimension { comp: String },
    DuplicateComponent(String),
    DuplicatePin { comp: String, pin: String },
    DuplicateNet(String),
    PinOutsideFootprint { comp: String, pin: String },
    EmptyNet(String),
    UnresolvedReference { net: String, comp: usize, pin: usize },
    PlacementLength { expected: usize, found: usize },
    FixedMoved { comp: String },
}

impl fmt::Display for DesignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveBoard { width, height } => write!(f, "board dimensions must be positive, got {width} x {height}"),
            Self::NonPositiveDimension { comp } => write!(f, "component {comp} has a nonpositive dimension"),
            Self::DuplicateComponent(id) => write!(f, "duplicate component id {id}"),
            Self::DuplicatePin { comp, pin } => write!(f, "duplicate pin {comp}.{pin}"),
            Self::DuplicateNet(id) => write!(f, "duplicate net id {id}"),
            Self::PinOutsideFootprint { comp, pin } => write!(f, "pin {comp}.{pin} lies outside its footprint"),
            Self::EmptyNet(id) => write!(f, "net {id} has no pins"),
            Self::UnresolvedReference { net, comp, pin } => {
                write!(f, "net {net} references component #{comp} pin #{pin}, which does not exist")
            }
            Self::PlacementLength { expected, found } => {
                write!(f, "placement has {found} entries, design has {expected} components")
            }
            Self::FixedMoved { comp } => write!(f, "fixed component {comp} is not at its locked position"),
        }
    }
}

impl core::error::Error for DesignError {}

/// A validated design. Construct through [`Design::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub board: Board,
    pub components: Vec<Component>,
    pub nets: Vec<Net>,
}

impl Design {
    pub fn new(board: Board, components: Vec<Component>, nets: Vec<Net>) -> Result<Self, DesignError> {
        if !(board.width > 0.0 && board.height > 0.0) {
            return Err(DesignError::NonPositiveBoard { width: board.width, height: board.height });
        }
        let mut ids = BTreeSet::new();
        for c in &components {
            if !(c.width > 0.0 && c.height > 0.0) {
                return Err(DesignError::NonPositiveDimension { comp: c.id.clone() });
            }
            if !ids.insert(c.id.as_str()) {
                return Err(DesignError::DuplicateComponent(c.id.clone()));
            }
            let mut pin_ids = BTreeSet::new();
            for p in &c.pins {
                if !pin_ids.insert(p.id.as_str()) {
                    return Err(DesignError::DuplicatePin { comp: c.id.clone(), pin: p.id.clone() });
                }
                let o = p.offset;
                if !(o.x >= 0.0 && o.x <= c.width && o.y >= 0.0 && o.y <= c.height) {
                    return Err(DesignError::PinOutsideFootprint { comp: c.id.clone(), pin: p.id.clone() });
                }
            }
        }
        let mut net_ids = BTreeSet::new();
        for n in &nets {
            if !net_ids.insert(n.id.as_str()) {
                return Err(DesignError::DuplicateNet(n.id.clone()));
            }
            if n.pins.is_empty() {
                return Err(DesignError::EmptyNet(n.id.clone()));
            }
            for r in &n.pins {
                if components.get(r.comp).and_then(|c| c.pins.get(r.pin)).is_none() {
                    return Err(DesignError::UnresolvedReference { net: n.id.clone(), comp: r.comp, pin: r.pin });
                }
            }
        }
        Ok(Self { board, components, nets })
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn movable(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.iter().enumerate().filter(|(_, c)| !c.is_fixed()).map(|(i, _)| i)
    }

    pub fn pin(&self, r: PinRef) -> &PinDef {
        &self.components[r.comp].pins[r.pin]
    }

    pub fn pin_position(&self, placement: &Placement, r: PinRef) -> Point {
        let comp = &self.components[r.comp];
        pin_position(&placement.poses[r.comp], comp, &comp.pins[r.pin])
    }

    /// Pin coordinates of one net (its pin matrix rows).
    pub fn net_pins(&self, placement: &Placement, net: usize) -> Vec<Point> {
        self.nets[net].pins.iter().map(|&r| self.pin_position(placement, r)).collect()
    }

    pub fn all_net_pins(&self, placement: &Placement) -> Vec<Vec<Point>> {
        (0..self.nets.len()).map(|e| self.net_pins(placement, e)).collect()
    }

    pub fn footprint(&self, placement: &Placement, comp: usize) -> Rect {
        self.components[comp].footprint(&placement.poses[comp])
    }

    pub fn total_component_area(&self) -> f64 {
        self.components.iter().map(Component::area).sum()
    }

    pub fn stats(&self) -> DesignStats {
        DesignStats {
            components: self.components.len(),
            locked: self.components.iter().filter(|c| c.is_fixed()).count(),
            nets: self.nets.len(),
            pins: self.components.iter().map(|c| c.pins.len()).sum(),
            utilization: self.total_component_area() / self.board.area(),
        }
    }

    /// Distinct connected pins per component (pins referenced by some net).
    pub fn connected_pins(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<BTreeSet<usize>> = alloc::vec![BTreeSet::new(); self.components.len()];
        for n in &self.nets {
            for r in &n.pins {
                out[r.comp].insert(r.pin);
            }
        }
        out.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// Table-style design summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignStats {
    pub components: usize,
    pub locked: usize,
    pub nets: usize,
    pub pins: usize,
    pub utilization: f64,
}

/// One pose per component, indexed like [`Design::components`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Placement {
    pub poses: Vec<Pose>,
}

impl Placement {
    pub fn new(poses: Vec<Pose>) -> Self {
        Self { poses }
    }

    /// Every movable component centered on the board, unrotated; fixed
    /// components at their locked poses.
    pub fn centered(design: &Design) -> Self {
        let c = design.board.center();
        let poses = design
            .components
            .iter()
            .map(|comp| comp.fixed.unwrap_or(Pose::new(c.x - 0.5 * comp.width, c.y - 0.5 * comp.height, Orientation::R0)))
            .collect();
        Self { poses }
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// Overwrite fixed components with their locked poses.
    pub fn snap_fixed(&mut self, design: &Design) {
        for (pose, comp) in self.poses.iter_mut().zip(&design.components) {
            if let Some(f) = comp.fixed {
                *pose = f;
            }
        }
    }

    /// Clip a movable component into the board under its current orientation.
    pub fn clamp_into_board(&mut self, design: &Design, comp: usize) {
        let c = &design.components[comp];
        let pose = &mut self.poses[comp];
        let (w, h) = c.dims(pose.r);
        pose.x = pose.x.min(design.board.width - w).max(0.0);
        pose.y = pose.y.min(design.board.height - h).max(0.0);
    }

    pub fn check(&self, design: &Design) -> Result<(), DesignError> {
        if self.poses.len() != design.components.len() {
            return Err(DesignError::PlacementLength { expected: design.components.len(), found: self.poses.len() });
        }
        for (pose, comp) in self.poses.iter().zip(&design.components) {
            if let Some(f) = comp.fixed {
                if *pose != f {
                    return Err(DesignError::FixedMoved { comp: comp.id.clone() });
                }
            }
        }
        Ok(())
    }
}
