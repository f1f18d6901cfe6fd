//! Placement quality metrics: wirelength, net separation, a star-model
//! crossing proxy for routing conflicts, and footprint overlap.

use alloc::string::String;
use alloc::vec::Vec;

use crate::design::{Design, Placement};
use crate::geometry::{segments_intersect, Point, Segment};
use crate::separation::{ns_cost, pair_set};

/// Overlaps at or below this area are rounding noise.
pub const OVERLAP_EPS: f64 = 1e-9;

/// Σ over nets of the pin bounding-box half perimeter.
pub fn hpwl_total(design: &Design, placement: &Placement) -> f64 {
    design.all_net_pins(placement).iter().map(|pins| hpwl(pins)).sum()
}

pub fn hpwl(pins: &[Point]) -> f64 {
    let Some(first) = pins.first() else { return 0.0 };
    let (mut x0, mut x1, mut y0, mut y1) = (first.x, first.x, first.y, first.y);
    for p in pins {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    x1 - x0 + y1 - y0
}

/// Mean separator residual over every pair of non-empty nets, each solved
/// from scratch.
pub fn ns_objective(design: &Design, placement: &Placement) -> f64 {
    ns_cost(design, placement, &pair_set(design, placement, None))
}

/// Star decomposition: centroid-to-pin segments per net. A two-pin net is
/// its single pin-to-pin segment, since both star arms would share the
/// centroid and a crossing there would count as a shared endpoint.
/// Zero-length segments are dropped.
pub fn star_segments(design: &Design, placement: &Placement) -> Vec<(usize, Segment)> {
    let mut out = Vec::new();
    for (e, pins) in design.all_net_pins(placement).iter().enumerate() {
        match pins.len() {
            0 | 1 => {}
            2 => {
                if pins[0] != pins[1] {
                    out.push((e, Segment::new(pins[0], pins[1])));
                }
            }
            k => {
                let sum = pins.iter().fold(Point::ZERO, |acc, &p| acc + p);
                let c = sum * (1.0 / k as f64);
                out.extend(pins.iter().filter(|&&p| p != c).map(|&p| (e, Segment::new(c, p))));
            }
        }
    }
    out
}

/// Intersecting star-segment pairs that belong to different nets. Sweeps
/// the segments' x extents so only overlapping spans are tested.
pub fn crossing_count(design: &Design, placement: &Placement) -> usize {
    let segs = star_segments(design, placement);
    let span = |s: &Segment| (s.a.x.min(s.b.x), s.a.x.max(s.b.x));
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&a, &b| span(&segs[a].1).0.total_cmp(&span(&segs[b].1).0));
    let mut active: Vec<usize> = Vec::new();
    let mut count = 0;
    for &k in &order {
        let (lo, _) = span(&segs[k].1);
        active.retain(|&a| span(&segs[a].1).1 >= lo);
        for &a in &active {
            if segs[a].0 != segs[k].0 && segments_intersect(segs[a].1, segs[k].1) {
                count += 1;
            }
        }
        active.push(k);
    }
    count
}

/// Pairs of footprints with positive overlap and their summed area.
pub fn overlap_violations(design: &Design, placement: &Placement) -> (usize, f64) {
    let rects: Vec<_> = (0..design.components.len()).map(|i| design.footprint(placement, i)).collect();
    let mut count = 0;
    let mut area = 0.0;
    for (i, a) in rects.iter().enumerate() {
        for b in &rects[i + 1..] {
            let o = a.overlap_area(b);
            if o > OVERLAP_EPS {
                count += 1;
                area += o;
            }
        }
    }
    (count, area)
}

/// Components whose footprint leaves the board.
pub fn out_of_bounds(design: &Design, placement: &Placement) -> usize {
    let board = design.board.rect();
    (0..design.components.len()).filter(|&i| !board.contains_rect(&design.footprint(placement, i))).count()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsReport {
    pub hpwl_total: f64,
    pub ns_objective: f64,
    pub crossing_count: usize,
    pub overlap_count: usize,
    pub overlap_area: f64,
    /// Seconds per named stage.
    pub runtime: Vec<(String, f64)>,
}

impl MetricsReport {
    pub fn evaluate(design: &Design, placement: &Placement, runtime: Vec<(String, f64)>) -> Self {
        let (overlap_count, overlap_area) = overlap_violations(design, placement);
        Self {
            hpwl_total: hpwl_total(design, placement),
            ns_objective: ns_objective(design, placement),
            crossing_count: crossing_count(design, placement),
            overlap_count,
            overlap_area,
            runtime,
        }
    }
}

/// `100 (base − new) / base`, or `None` for a zero baseline.
pub fn percent_improvement(base: f64, new: f64) -> Option<f64> {
    (base != 0.0).then(|| 100.0 * (base - new) / base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Board, Component, Net, Orientation, PinDef, PinRef, Pose};
    use alloc::string::ToString;
    use alloc::vec;

    fn dot(id: &str) -> Component {
        Component { id: id.to_string(), width: 1.0, height: 1.0, fixed: None, pins: vec![PinDef { id: "p".to_string(), offset: Point::ZERO }] }
    }

    fn design(n: usize, nets: &[&[usize]]) -> Design {
        let comps = (0..n).map(|i| dot(&alloc::format!("c{i}"))).collect();
        let nets = nets
            .iter()
            .enumerate()
            .map(|(e, cs)| Net { id: alloc::format!("n{e}"), pins: cs.iter().map(|&c| PinRef { comp: c, pin: 0 }).collect() })
            .collect();
        Design::new(Board { width: 20.0, height: 20.0, layers: 2 }, comps, nets).unwrap()
    }

    fn at(xy: &[(f64, f64)]) -> Placement {
        Placement::new(xy.iter().map(|&(x, y)| Pose::new(x, y, Orientation::R0)).collect())
    }

    #[test]
    fn hpwl_examples() {
        let d = design(3, &[&[0, 1], &[2]]);
        let p = at(&[(0.0, 0.0), (3.0, 4.0), (7.0, 7.0)]);
        assert_eq!(hpwl_total(&d, &p), 7.0);
        let shifted = at(&[(5.0, 1.0), (8.0, 5.0), (1.0, 1.0)]);
        assert_eq!(hpwl_total(&d, &shifted), 7.0);
    }

    #[test]
    fn crossing_examples() {
        let d = design(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(crossing_count(&d, &at(&[(0.0, 0.0), (4.0, 4.0), (0.0, 4.0), (4.0, 0.0)])), 1);
        assert_eq!(crossing_count(&d, &at(&[(0.0, 0.0), (4.0, 0.0), (0.0, 4.0), (4.0, 4.0)])), 0);
    }

    #[test]
    fn star_arms_of_one_net_never_count() {
        let d = design(4, &[&[0, 1, 2, 3]]);
        assert_eq!(star_segments(&d, &at(&[(0.0, 0.0), (4.0, 4.0), (0.0, 4.0), (4.0, 0.0)])).len(), 4);
        assert_eq!(crossing_count(&d, &at(&[(0.0, 0.0), (4.0, 4.0), (0.0, 4.0), (4.0, 0.0)])), 0);
    }

    #[test]
    fn overlap_examples() {
        let d = design(2, &[]);
        assert_eq!(overlap_violations(&d, &at(&[(1.0, 1.0), (1.0, 1.0)])), (1, 1.0));
        assert_eq!(overlap_violations(&d, &at(&[(1.0, 1.0), (1.5, 1.0)])), (1, 0.5));
        assert_eq!(overlap_violations(&d, &at(&[(1.0, 1.0), (2.0, 1.0)])), (0, 0.0));
    }

    #[test]
    fn coincident_single_pin_nets() {
        let d = design(2, &[&[0], &[1]]);
        assert!((ns_objective(&d, &at(&[(3.0, 3.0), (3.0, 3.0)])) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn improvement_convention() {
        assert_eq!(percent_improvement(200.0, 150.0), Some(25.0));
        assert_eq!(percent_improvement(100.0, 120.0), Some(-20.0));
        assert_eq!(percent_improvement(0.0, 1.0), None);
    }
}
