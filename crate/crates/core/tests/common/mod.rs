//! Independent oracles shared by the integration and acceptance tests. They
//! recompute geometry from first principles rather than calling the crate.
#![allow(dead_code)]

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tspcn::phase2::FeasibleRegion;
use tspcn::{generate_instance, Circle, GenerateParams, Instance, Point, Rect};

pub fn instance(n: usize, seed: u64) -> Instance {
    generate_instance(&GenerateParams {
        n,
        center_box: Rect {
            xmin: 0.0,
            ymin: 0.0,
            xmax: 100.0,
            ymax: 100.0,
        },
        radius_range: (2.0, 6.0),
        seed,
        min_center_gap: None,
    })
    .unwrap()
}

pub fn zero_radius(n: usize, seed: u64) -> Instance {
    let base = instance(n, seed);
    Instance::new(
        base.circles
            .iter()
            .map(|c| Circle::new(c.center_x, c.center_y, 0.0))
            .collect(),
    )
    .unwrap()
}

/// Slot `s` of `k` sits at angle `2*pi*s/k + pi/k`.
pub fn oracle_node(c: &Circle, s: usize, k: usize) -> (f64, f64) {
    let theta = std::f64::consts::TAU * s as f64 / k as f64 + std::f64::consts::PI / k as f64;
    (
        c.center_x + c.radius * theta.cos(),
        c.center_y + c.radius * theta.sin(),
    )
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Minimum over every order (circle 0 first) and every slot assignment.
pub fn brute_force(inst: &Instance, k: usize) -> f64 {
    let n = inst.len();
    let nodes: Vec<(f64, f64)> = inst
        .circles
        .iter()
        .flat_map(|c| (0..k).map(move |s| oracle_node(c, s, k)))
        .collect();
    let d = |a: usize, b: usize| dist(nodes[a], nodes[b]);
    let m = n * k;
    let table: Vec<f64> = (0..m * m).map(|i| d(i / m, i % m)).collect();

    let mut best = f64::INFINITY;
    let mut slots = vec![0usize; n];
    for perm in (1..n).permutations(n - 1) {
        let order: Vec<usize> = std::iter::once(0).chain(perm).collect();
        slots.iter_mut().for_each(|s| *s = 0);
        loop {
            let mut len = 0.0;
            for i in 0..n {
                let (a, b) = (order[i], order[(i + 1) % n]);
                len += table[(a * k + slots[a]) * m + b * k + slots[b]];
            }
            best = best.min(len);
            // odometer over slot assignments
            let mut pos = 0;
            while pos < n {
                slots[pos] += 1;
                if slots[pos] < k {
                    break;
                }
                slots[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    best
}

/// Minimum over the `k * k` slot pairs of a two-circle tour.
pub fn two_circle_discrete(a: &Circle, b: &Circle, k: usize) -> f64 {
    (0..k)
        .cartesian_product(0..k)
        .map(|(s, t)| 2.0 * dist(oracle_node(a, s, k), oracle_node(b, t, k)))
        .fold(f64::INFINITY, f64::min)
}

/// Classical Held-Karp over points.
pub fn held_karp(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    if n == 2 {
        return 2.0 * dist(pts[0], pts[1]);
    }
    let full = 1usize << (n - 1);
    // dp[mask][j]: shortest path from 0 through the cities of mask (over 1..n), ending at j
    let mut dp = vec![f64::INFINITY; full * n];
    for j in 1..n {
        dp[(1 << (j - 1)) * n + j] = dist(pts[0], pts[j]);
    }
    for mask in 1..full {
        for j in 1..n {
            let cur = dp[mask * n + j];
            if cur.is_infinite() || mask & (1 << (j - 1)) == 0 {
                continue;
            }
            for t in 1..n {
                if mask & (1 << (t - 1)) != 0 {
                    continue;
                }
                let next = mask | (1 << (t - 1));
                let v = cur + dist(pts[j], pts[t]);
                if v < dp[next * n + t] {
                    dp[next * n + t] = v;
                }
            }
        }
    }
    (1..n)
        .map(|j| dp[(full - 1) * n + j] + dist(pts[j], pts[0]))
        .fold(f64::INFINITY, f64::min)
}

pub fn tour_total(order: &[usize], points: &[Point]) -> f64 {
    let n = order.len();
    (0..n)
        .map(|i| points[order[i]].dist(points[order[(i + 1) % n]]))
        .sum()
}

/// Best objective `|prev - q| + |q - next|` over a 100 x 100 grid on the
/// region's bounding box, keeping only grid points inside the region.
pub fn grid_best(prev: Point, next: Point, region: &FeasibleRegion) -> f64 {
    let c = region.circle;
    let (mut x0, mut x1) = (c.center_x - c.radius, c.center_x + c.radius);
    let (mut y0, mut y1) = (c.center_y - c.radius, c.center_y + c.radius);
    if let Some(b) = region.bx {
        x0 = x0.max(b.umin);
        x1 = x1.min(b.umax);
        y0 = y0.max(b.vmin);
        y1 = y1.min(b.vmax);
    }
    const STEPS: usize = 100;
    let mut best = f64::INFINITY;
    for i in 0..STEPS {
        for j in 0..STEPS {
            let q = Point::new(
                x0 + (x1 - x0) * i as f64 / (STEPS - 1) as f64,
                y0 + (y1 - y0) * j as f64 / (STEPS - 1) as f64,
            );
            let inside =
                (q.x - c.center_x).powi(2) + (q.y - c.center_y).powi(2) <= c.radius * c.radius;
            if inside {
                best = best.min(prev.dist(q) + q.dist(next));
            }
        }
    }
    best
}

pub struct Triple {
    pub prev: Point,
    pub next: Point,
    pub region: FeasibleRegion,
}

/// Random (prev, next, region) triples; half the regions carry a sector box.
pub fn random_triples(count: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let circle = Circle::new(
                rng.gen_range(-10.0..10.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(0.5..5.0),
            );
            let bx = rng.gen_bool(0.5).then(|| {
                let k = [4usize, 6, 8][rng.gen_range(0..3)];
                tspcn::geometry::sector_box(&circle, rng.gen_range(0..k), k)
            });
            let mut pt = || Point::new(rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0));
            Triple {
                prev: pt(),
                next: pt(),
                region: FeasibleRegion { circle, bx },
            }
        })
        .collect()
}
