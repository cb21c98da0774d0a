//! Fixed-order point placement.
//!
//! With the circle order fixed the tour length is a convex function of the
//! chosen points. It is minimized by cyclic coordinate descent: each point in
//! turn is moved to the best position in its region given its two current
//! tour neighbors.

use crate::error::{Error, Result};
use crate::geometry::{
    clip_segment_to_box, closest_point_on_segment, project_to_disk, sector_box, Point, SectorBox,
};
use crate::model::{Circle, ContinuousSolution, Instance, SectorMode};

/// Feasibility tolerance for start points.
const START_TOL: f64 = 1e-9;
/// Boundary samples per arc before golden-section refinement.
const ARC_SAMPLES: usize = 64;
const GOLDEN_TOL: f64 = 1e-12;
/// Relative distance under which consecutive points move as one block.
const COINCIDE_TOL: f64 = 1e-9;

/// Disk, optionally intersected with an axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleRegion {
    pub circle: Circle,
    pub bx: Option<SectorBox>,
}

impl FeasibleRegion {
    pub fn disk(circle: Circle) -> Self {
        Self { circle, bx: None }
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let r = self.circle.radius;
        p.dist_sq(self.circle.center()) <= r * r + tol && self.bx.is_none_or(|b| b.contains(p, tol))
    }
}

pub fn build_regions(
    instance: &Instance,
    slots: &[usize],
    k: usize,
    mode: SectorMode,
) -> Vec<FeasibleRegion> {
    instance
        .circles
        .iter()
        .zip(slots)
        .map(|(c, &s)| FeasibleRegion {
            circle: *c,
            bx: match mode {
                SectorMode::FullDisk => None,
                SectorMode::SectorBox => Some(sector_box(c, s, k)),
            },
        })
        .collect()
}

fn detour(p: Point, prev: Point, next: Point) -> f64 {
    p.dist(prev) + p.dist(next)
}

/// Minimizer of `|p - prev| + |p - next|` over the region.
///
/// When the segment `[prev, next]` meets the region the answer is the
/// segment point closest to the disk center. Otherwise the minimum lies on
/// the region boundary: each boundary arc is scanned and the best bracket
/// refined by golden section; each straight boundary piece is searched by
/// golden section directly, the objective being convex along a line.
pub fn point_subproblem(prev: Point, next: Point, region: &FeasibleRegion) -> Result<Point> {
    if !prev.is_finite() || !next.is_finite() {
        return Err(Error::Contract(format!(
            "non-finite neighbor in point subproblem: {prev:?}, {next:?}"
        )));
    }
    Ok(block_minimizer(prev, next, std::slice::from_ref(region))
        .expect("a single region is never empty"))
}

fn intersect_boxes(regions: &[FeasibleRegion]) -> Option<Option<SectorBox>> {
    let mut acc: Option<SectorBox> = None;
    for b in regions.iter().filter_map(|r| r.bx) {
        acc = Some(match acc {
            None => b,
            Some(a) => SectorBox {
                umin: a.umin.max(b.umin),
                umax: a.umax.min(b.umax),
                vmin: a.vmin.max(b.vmin),
                vmax: a.vmax.min(b.vmax),
            },
        });
    }
    match acc {
        Some(b) if b.umin > b.umax || b.vmin > b.vmax => None,
        other => Some(other),
    }
}

/// Same minimization over the intersection of several regions, used for
/// runs of coincident points that have to move together. `None` when the
/// boxes do not intersect.
fn block_minimizer(prev: Point, next: Point, regions: &[FeasibleRegion]) -> Option<Point> {
    let bx = intersect_boxes(regions)?;
    let disks: Vec<Circle> = regions.iter().map(|r| r.circle).collect();
    if let Some(z) = disks.iter().find(|c| c.radius == 0.0) {
        return Some(z.center());
    }
    let anchor = disks[0].center();

    let clipped = match &bx {
        Some(b) => clip_segment_to_box(prev, next, b),
        None => Some((prev, next)),
    };
    if let Some((s, e)) = clipped {
        if let [disk] = disks.as_slice() {
            let q = closest_point_on_segment(s, e, anchor);
            if q.dist(anchor) <= disk.radius {
                return Some(q);
            }
        } else if let Some((t0, t1)) = segment_in_disks(s, e, &disks) {
            let (a, b) = (lerp(s, e, t0), lerp(s, e, t1));
            return Some(closest_point_on_segment(a, b, anchor));
        }
    }

    let f = |p: Point| detour(p, prev, next);
    let mut best: Option<(f64, Point)> = None;
    let mut offer = |p: Point| {
        let p = match &bx {
            Some(b) => b.clamp(p),
            None => p,
        };
        let v = f(p);
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, p));
        }
    };

    for (i, circle) in disks.iter().enumerate() {
        let (c, r) = (circle.center(), circle.radius);
        let at = |theta: f64| Point::new(c.x + r * theta.cos(), c.y + r * theta.sin());
        for (lo, hi) in boundary_arcs(i, &disks, bx.as_ref()) {
            let step = (hi - lo) / ARC_SAMPLES as f64;
            let samples: Vec<f64> = (0..=ARC_SAMPLES).map(|s| lo + step * s as f64).collect();
            let (ibest, _) = samples
                .iter()
                .enumerate()
                .map(|(s, &t)| (s, f(at(t))))
                .fold(
                    (0, f64::INFINITY),
                    |acc, (s, v)| if v < acc.1 { (s, v) } else { acc },
                );
            offer(at(samples[ibest]));
            let a = samples[ibest.saturating_sub(1)];
            let b = samples[(ibest + 1).min(ARC_SAMPLES)];
            let t = golden_section(
                |t| f(at(t)),
                a,
                b,
                GOLDEN_TOL * (1.0 + lo.abs().max(hi.abs())),
            );
            offer(at(t));
        }
    }
    if let Some(b) = &bx {
        for (s, e) in box_edges_in_disks(&disks, b) {
            offer(s);
            offer(e);
            let t = golden_section(|t| f(lerp(s, e, t)), 0.0, 1.0, GOLDEN_TOL);
            offer(lerp(s, e, t));
        }
    }

    Some(match best {
        Some((_, p)) => p,
        None => {
            // Region too thin to expose any boundary piece; take its point nearest the center.
            let q = bx.map_or(anchor, |b| b.clamp(anchor));
            project_to_disk(q, &disks[0])
        }
    })
}

fn lerp(s: Point, e: Point, t: f64) -> Point {
    Point::new(s.x + t * (e.x - s.x), s.y + t * (e.y - s.y))
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}

fn inside_disk(p: Point, c: &Circle) -> bool {
    p.dist(c.center()) <= c.radius * (1.0 + 1e-12) + 1e-12
}

/// Angle intervals (radians, increasing) of circle `i` lying inside the box
/// and inside every other disk.
fn boundary_arcs(i: usize, disks: &[Circle], bx: Option<&SectorBox>) -> Vec<(f64, f64)> {
    use std::f64::consts::{PI, TAU};
    let circle = &disks[i];
    let (a0, b0, r) = (circle.center_x, circle.center_y, circle.radius);
    let mut cuts: Vec<f64> = Vec::new();
    if let Some(b) = bx {
        for x in [b.umin, b.umax] {
            let c = (x - a0) / r;
            if c.abs() <= 1.0 {
                let t = c.acos();
                cuts.push(t);
                cuts.push(-t);
            }
        }
        for y in [b.vmin, b.vmax] {
            let s = (y - b0) / r;
            if s.abs() <= 1.0 {
                let t = s.asin();
                cuts.push(t);
                cuts.push(PI - t);
            }
        }
    }
    for (j, other) in disks.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = circle.center().dist(other.center());
        if d == 0.0 || d > r + other.radius || d < (r - other.radius).abs() {
            continue;
        }
        let phi = (other.center_y - b0).atan2(other.center_x - a0);
        let alpha = ((r * r + d * d - other.radius * other.radius) / (2.0 * r * d))
            .clamp(-1.0, 1.0)
            .acos();
        cuts.push(phi + alpha);
        cuts.push(phi - alpha);
    }
    for t in cuts.iter_mut() {
        *t = t.rem_euclid(TAU);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let inside = |t: f64| {
        let p = Point::new(a0 + r * t.cos(), b0 + r * t.sin());
        bx.is_none_or(|b| b.contains(p, 1e-12 * (1.0 + r)))
            && disks
                .iter()
                .enumerate()
                .all(|(j, c)| j == i || inside_disk(p, c))
    };
    if cuts.is_empty() {
        return if inside(0.0) {
            vec![(0.0, TAU)]
        } else {
            Vec::new()
        };
    }
    let m = cuts.len();
    (0..m)
        .map(|s| {
            let lo = cuts[s];
            let hi = if s + 1 < m {
                cuts[s + 1]
            } else {
                cuts[0] + TAU
            };
            (lo, hi)
        })
        .filter(|&(lo, hi)| hi > lo && inside(0.5 * (lo + hi)))
        .collect()
}

/// Box edges clipped to the intersection of the disks.
fn box_edges_in_disks(disks: &[Circle], b: &SectorBox) -> Vec<(Point, Point)> {
    let corners = [
        Point::new(b.umin, b.vmin),
        Point::new(b.umax, b.vmin),
        Point::new(b.umax, b.vmax),
        Point::new(b.umin, b.vmax),
    ];
    (0..4)
        .filter_map(|i| {
            let (s, e) = (corners[i], corners[(i + 1) % 4]);
            if s == e {
                return None;
            }
            segment_in_disks(s, e, disks).map(|(t0, t1)| (lerp(s, e, t0), lerp(s, e, t1)))
        })
        .collect()
}

/// Parameter interval of `s + t (e - s)`, `t` in `[0, 1]`, inside every disk.
fn segment_in_disks(s: Point, e: Point, disks: &[Circle]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for circle in disks {
        let (t0, t1) = segment_in_disk(s, e, circle)?;
        lo = lo.max(t0);
        hi = hi.min(t1);
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

fn segment_in_disk(s: Point, e: Point, circle: &Circle) -> Option<(f64, f64)> {
    let c = circle.center();
    let (dx, dy) = (e.x - s.x, e.y - s.y);
    let (fx, fy) = (s.x - c.x, s.y - c.y);
    let a = dx * dx + dy * dy;
    if a == 0.0 {
        return (s.dist(c) <= circle.radius).then_some((0.0, 1.0));
    }
    let bq = 2.0 * (fx * dx + fy * dy);
    let cq = fx * fx + fy * fy - circle.radius * circle.radius;
    let disc = bq * bq - 4.0 * a * cq;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = ((-bq - sq) / (2.0 * a)).max(0.0);
    let t1 = ((-bq + sq) / (2.0 * a)).min(1.0);
    (t0 <= t1).then_some((t0, t1))
}

/// Result of [`sequence_refine`].
#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub solution: ContinuousSolution,
    pub sweeps: usize,
}

/// Cyclic coordinate descent over the points of a fixed tour.
pub fn sequence_refine(
    instance: &Instance,
    order: &[usize],
    start_points: &[Point],
    regions: &[FeasibleRegion],
    descent_tol: f64,
    descent_max_sweeps: usize,
) -> Result<RefineOutcome> {
    sequence_refine_observed(
        instance,
        order,
        start_points,
        regions,
        descent_tol,
        descent_max_sweeps,
        |_, _| {},
    )
}

/// [`sequence_refine`] calling `observe(circle, points)` after every single-point update.
pub fn sequence_refine_observed(
    instance: &Instance,
    order: &[usize],
    start_points: &[Point],
    regions: &[FeasibleRegion],
    descent_tol: f64,
    descent_max_sweeps: usize,
    mut observe: impl FnMut(usize, &[Point]),
) -> Result<RefineOutcome> {
    let n = instance.len();
    if order.len() != n || start_points.len() != n || regions.len() != n {
        return Err(Error::Contract(format!(
            "refine inputs disagree on size: {n} circles, order {}, points {}, regions {}",
            order.len(),
            start_points.len(),
            regions.len()
        )));
    }
    let mut seen = vec![false; n];
    for &c in order {
        if c >= n || std::mem::replace(&mut seen[c], true) {
            return Err(Error::Contract(format!(
                "order {order:?} is not a permutation"
            )));
        }
    }
    for (i, (p, region)) in start_points.iter().zip(regions).enumerate() {
        if !region.contains(*p, START_TOL) {
            return Err(Error::Contract(format!(
                "start point {p:?} of circle {i} lies outside its feasible region"
            )));
        }
    }

    let mut points = start_points.to_vec();
    let total = |pts: &[Point]| -> f64 {
        (0..n)
            .map(|i| pts[order[i]].dist(pts[order[(i + 1) % n]]))
            .sum()
    };
    let mut current = total(&points);
    let mut sweeps = 0;
    while sweeps < descent_max_sweeps {
        sweeps += 1;
        let before = current;
        for pos in 0..n {
            let c = order[pos];
            let prev = points[order[(pos + n - 1) % n]];
            let next = points[order[(pos + 1) % n]];
            let cand = point_subproblem(prev, next, &regions[c])?;
            if detour(cand, prev, next) < detour(points[c], prev, next) {
                points[c] = cand;
            }
            observe(c, &points);
        }
        // A point that coincides with a neighbor cannot move alone without
        // lengthening the tour, so coincident runs also move as one block.
        for run in coincident_runs(order, &points) {
            let prev = points[order[(run[0] + n - 1) % n]];
            let next = points[order[(run[run.len() - 1] + 1) % n]];
            let before = prev.dist(points[order[run[0]]])
                + run
                    .windows(2)
                    .map(|w| points[order[w[0]]].dist(points[order[w[1]]]))
                    .sum::<f64>()
                + points[order[run[run.len() - 1]]].dist(next);
            let block: Vec<FeasibleRegion> = run.iter().map(|&pos| regions[order[pos]]).collect();
            if let Some(cand) = block_minimizer(prev, next, &block) {
                if block.iter().all(|r| r.contains(cand, START_TOL))
                    && detour(cand, prev, next) < before
                {
                    for &pos in &run {
                        points[order[pos]] = cand;
                    }
                }
            }
            observe(order[run[0]], &points);
        }
        current = total(&points);
        if before <= 0.0 || (before - current) / before < descent_tol {
            break;
        }
    }
    Ok(RefineOutcome {
        solution: ContinuousSolution::from_points(order.to_vec(), points),
        sweeps,
    })
}

/// Maximal runs (tour positions) of two or more consecutive coincident
/// points, excluding the case where every point coincides.
fn coincident_runs(order: &[usize], points: &[Point]) -> Vec<Vec<usize>> {
    let n = order.len();
    let same = |pos: usize| {
        let (a, b) = (points[order[pos]], points[order[(pos + 1) % n]]);
        a.dist(b) <= COINCIDE_TOL * (1.0 + a.x.abs().max(a.y.abs()))
    };
    let Some(start) = (0..n).find(|&pos| !same(pos)) else {
        return Vec::new();
    };
    let mut runs = Vec::new();
    let mut current = Vec::new();
    for step in 1..=n {
        let pos = (start + step) % n;
        current.push(pos);
        if !same(pos) {
            if current.len() >= 2 {
                runs.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
        }
    }
    runs
}
