//! Planar primitives: points, convex hulls, segments and axis-aligned rects.
//!
//! All predicates use an absolute tolerance of [`EPS`] millimetres. Contact
//! counts as intersection for hulls (closed sets); for segments a single
//! shared endpoint does not.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::math;

/// Absolute tolerance for orientation predicates, in millimetres.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn approx_eq(self, other: Point) -> bool {
        (self.x - other.x).abs() <= EPS && (self.y - other.y).abs() <= EPS
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point {
    #[inline]
    fn add_assign(&mut self, rhs: Point) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Point {
    #[inline]
    fn sub_assign(&mut self, rhs: Point) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Orientation of `c` relative to the directed line `a -> b`:
/// positive for a left turn, negative for a right turn, zero when collinear.
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn orient_sign(a: Point, b: Point, c: Point) -> i8 {
    let o = orient(a, b, c);
    if o > EPS {
        1
    } else if o < -EPS {
        -1
    } else {
        0
    }
}

/// Convex polygon with counterclockwise vertices. One vertex is a point, two
/// are a segment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Closed boundary edges. A point yields one zero-length edge and a
    /// segment yields itself once.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        let count = match n {
            0 => 0,
            1 | 2 => 1,
            _ => n,
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed containment test; boundary points are inside.
    pub fn contains(&self, p: Point) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0].approx_eq(p),
            2 => on_segment(self.vertices[0], self.vertices[1], p),
            n => (0..n).all(|i| orient(self.vertices[i], self.vertices[(i + 1) % n], p) >= -EPS),
        }
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let twice: f64 = (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum();
        0.5 * twice
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyInput;

impl core::fmt::Display for EmptyInput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("convex hull of an empty point set")
    }
}

impl core::error::Error for EmptyInput {}

/// Andrew's monotone chain. Collinear boundary points are dropped, so the
/// result is strictly convex; all-collinear input yields the two extreme
/// points and coincident input a single point.
pub fn convex_hull(points: &[Point]) -> Result<Polygon, EmptyInput> {
    if points.is_empty() {
        return Err(EmptyInput);
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(Ordering::Equal).then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal)));
    pts.dedup_by(|a, b| a.approx_eq(*b));
    if pts.len() <= 2 {
        return Ok(Polygon { vertices: pts });
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= EPS {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= EPS {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(Polygon { vertices: hull })
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    if orient_sign(a, b, p) != 0 {
        return false;
    }
    p.x >= a.x.min(b.x) - EPS && p.x <= a.x.max(b.x) + EPS && p.y >= a.y.min(b.y) - EPS && p.y <= a.y.max(b.y) + EPS
}

/// Closed segment intersection (any shared point).
fn closed_segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient_sign(a, b, c);
    let o2 = orient_sign(a, b, d);
    let o3 = orient_sign(c, d, a);
    let o4 = orient_sign(c, d, b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

/// True when the two closed hulls share at least one point.
pub fn hulls_intersect(a: &Polygon, b: &Polygon) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    for (p0, p1) in a.edges() {
        for (q0, q1) in b.edges() {
            if closed_segments_touch(p0, p1, q0, q1) {
                return true;
            }
        }
    }
    b.contains(a.vertices[0]) || a.contains(b.vertices[0])
}

/// Euclidean distance between two closed convex hulls, zero when they meet.
pub fn hull_distance(a: &Polygon, b: &Polygon) -> f64 {
    if hulls_intersect(a, b) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p0, p1) in a.edges() {
        for (q0, q1) in b.edges() {
            best = best
                .min(point_segment_distance(p0, q0, q1))
                .min(point_segment_distance(p1, q0, q1))
                .min(point_segment_distance(q0, p0, p1))
                .min(point_segment_distance(q1, p0, p1));
        }
    }
    best
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }
}

/// True when the segments share a point, except when the only shared point
/// is a common endpoint.
pub fn segments_intersect(s1: Segment, s2: Segment) -> bool {
    if !closed_segments_touch(s1.a, s1.b, s2.a, s2.b) {
        return false;
    }
    let shared = [(s1.a, s1.b, s2.a, s2.b), (s1.a, s1.b, s2.b, s2.a), (s1.b, s1.a, s2.a, s2.b), (s1.b, s1.a, s2.b, s2.a)]
        .into_iter()
        .find(|(p, _, q, _)| p.approx_eq(*q));
    let Some((joint, far1, _, far2)) = shared else {
        return true;
    };
    let d1 = far1 - joint;
    let d2 = far2 - joint;
    let degenerate1 = d1.norm() <= EPS;
    let degenerate2 = d2.norm() <= EPS;
    if degenerate1 || degenerate2 {
        // A zero-length segment sitting on the joint touches nothing else.
        return false;
    }
    // Non-parallel lines through a common point meet only there. Collinear
    // segments overlap beyond the joint when they leave it the same way.
    let collinear = orient_sign(joint, far1, far2) == 0;
    collinear && d1.dot(d2) > 0.0
}

/// Axis-aligned rectangle, lower-left corner plus extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn top(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + 0.5 * self.w, self.y + 0.5 * self.h)
    }

    /// Area of the interior intersection; contact within [`EPS`] is zero.
    pub fn overlap_area(&self, other: &Rect) -> f64 {
        let ox = self.right().min(other.right()) - self.x.max(other.x);
        let oy = self.top().min(other.top()) - self.y.max(other.y);
        if ox > EPS && oy > EPS {
            ox * oy
        } else {
            0.0
        }
    }

    pub fn contains_rect(&self, inner: &Rect) -> bool {
        inner.x >= self.x - EPS && inner.y >= self.y - EPS && inner.right() <= self.right() + EPS && inner.top() <= self.top() + EPS
    }
}

/// Signed boundary-to-boundary gaps `(dx, dy)`. A negative value is the
/// overlap depth of the projections on that axis.
pub fn rect_gap(a: &Rect, b: &Rect) -> (f64, f64) {
    let dx = a.x.max(b.x) - a.right().min(b.right());
    let dy = a.y.max(b.y) - a.top().min(b.top());
    (dx, dy)
}
