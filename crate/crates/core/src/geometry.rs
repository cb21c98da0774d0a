//! Planar geometry: slot placement on circles, node distances, sector boxes,
//! disk projection and segment tests.
//!
//! Slot `s` of `k` covers the arc `[360 s / k, 360 (s + 1) / k]` degrees and is
//! represented by the midpoint of that arc. With the default `k = 4` the four
//! representatives sit at 45, 135, 225 and 315 degrees.

use serde::{Deserialize, Serialize};

use crate::model::Circle;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// One discretization node: slot `slot` of circle `circle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteNode {
    pub circle: usize,
    pub slot: usize,
    pub angle_deg: f64,
    pub point: Point,
}

/// Axis-aligned bounds on a point's coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBox {
    pub umin: f64,
    pub umax: f64,
    pub vmin: f64,
    pub vmax: f64,
}

impl SectorBox {
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.umin - tol
            && p.x <= self.umax + tol
            && p.y >= self.vmin - tol
            && p.y <= self.vmax + tol
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(
            p.x.clamp(self.umin, self.umax),
            p.y.clamp(self.vmin, self.vmax),
        )
    }
}

/// Angle in degrees of the arc midpoint represented by `slot`.
pub fn slot_angle(slot: usize, k: usize) -> f64 {
    assert!(k >= 1 && slot < k, "slot {slot} out of range for k = {k}");
    let width = 360.0 / k as f64;
    width * slot as f64 + width / 2.0
}

/// `(cos, sin)` of an angle in degrees; multiples of 90 are returned exactly.
pub(crate) fn unit_deg(deg: f64) -> (f64, f64) {
    let quarter = deg / 90.0;
    if quarter == quarter.round() {
        match (quarter as i64).rem_euclid(4) {
            0 => return (1.0, 0.0),
            1 => return (0.0, 1.0),
            2 => return (-1.0, 0.0),
            _ => return (0.0, -1.0),
        }
    }
    let rad = deg.to_radians();
    (rad.cos(), rad.sin())
}

fn on_circle(circle: &Circle, deg: f64) -> Point {
    let (c, s) = unit_deg(deg);
    Point::new(
        circle.center_x + circle.radius * c,
        circle.center_y + circle.radius * s,
    )
}

pub fn node_point(circle: &Circle, slot: usize, k: usize) -> Point {
    on_circle(circle, slot_angle(slot, k))
}

pub fn discrete_node(circle_index: usize, circle: &Circle, slot: usize, k: usize) -> DiscreteNode {
    DiscreteNode {
        circle: circle_index,
        slot,
        angle_deg: slot_angle(slot, k),
        point: node_point(circle, slot, k),
    }
}

pub fn node_distance(ci: &Circle, slot_i: usize, cj: &Circle, slot_j: usize, k: usize) -> f64 {
    node_point(ci, slot_i, k).dist(node_point(cj, slot_j, k))
}

/// Bounding box of the closed pie slice covered by `slot`.
pub fn sector_box(circle: &Circle, slot: usize, k: usize) -> SectorBox {
    assert!(k >= 1 && slot < k, "slot {slot} out of range for k = {k}");
    let width = 360.0 / k as f64;
    let lo = width * slot as f64;
    let hi = width * (slot + 1) as f64;

    let mut pts = vec![
        circle.center(),
        on_circle(circle, lo),
        on_circle(circle, hi),
    ];
    pts.extend(
        [0.0, 90.0, 180.0, 270.0, 360.0]
            .into_iter()
            .filter(|a| *a > lo && *a < hi)
            .map(|a| on_circle(circle, a)),
    );
    let mut b = SectorBox {
        umin: f64::INFINITY,
        umax: f64::NEG_INFINITY,
        vmin: f64::INFINITY,
        vmax: f64::NEG_INFINITY,
    };
    for p in pts {
        b.umin = b.umin.min(p.x);
        b.umax = b.umax.max(p.x);
        b.vmin = b.vmin.min(p.y);
        b.vmax = b.vmax.max(p.y);
    }
    b
}

/// Nearest point of the closed disk to `p`.
pub fn project_to_disk(p: Point, circle: &Circle) -> Point {
    let c = circle.center();
    let d = p.dist(c);
    if d <= circle.radius {
        return p;
    }
    let t = circle.radius / d;
    Point::new(c.x + t * (p.x - c.x), c.y + t * (p.y - c.y))
}

/// Point of segment `[a, b]` closest to `q`.
pub fn closest_point_on_segment(a: Point, b: Point, q: Point) -> Point {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return a;
    }
    let t = (((q.x - a.x) * dx + (q.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    a.lerp(b, t)
}

/// If `[a, b]` meets the closed disk, the segment point closest to the center.
pub fn segment_disk_hit(a: Point, b: Point, circle: &Circle) -> Option<Point> {
    let q = closest_point_on_segment(a, b, circle.center());
    (q.dist(circle.center()) <= circle.radius).then_some(q)
}

/// Part of segment `[a, b]` inside the box (Liang-Barsky clipping).
pub fn clip_segment_to_box(a: Point, b: Point, bx: &SectorBox) -> Option<(Point, Point)> {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    let checks = [
        (-dx, a.x - bx.umin),
        (dx, bx.umax - a.x),
        (-dy, a.y - bx.vmin),
        (dy, bx.vmax - a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    let start = if t0 == 0.0 { a } else { a.lerp(b, t0) };
    let end = if t1 == 1.0 { b } else { a.lerp(b, t1) };
    Some((bx.clamp(start), bx.clamp(end)))
}
