//! Domain types, seeded instance generation and JSON persistence.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A disk neighborhood. A zero radius degenerates to an ordinary TSP city.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    #[serde(rename = "x")]
    pub center_x: f64,
    #[serde(rename = "y")]
    pub center_y: f64,
    #[serde(rename = "r")]
    pub radius: f64,
}

impl Circle {
    pub const fn new(center_x: f64, center_y: f64, radius: f64) -> Self {
        Self {
            center_x,
            center_y,
            radius,
        }
    }

    pub fn center(&self) -> Point {
        Point::new(self.center_x, self.center_y)
    }

    fn check(&self, index: usize) -> Result<()> {
        if !(self.center_x.is_finite() && self.center_y.is_finite() && self.radius.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "circle {index} has a non-finite field"
            )));
        }
        if self.radius < 0.0 {
            return Err(Error::InvalidInstance(format!(
                "circle {index} has negative radius {}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// The problem input: an ordered list of circles. Circle 0 anchors every tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub circles: Vec<Circle>,
}

impl Instance {
    pub fn new(circles: Vec<Circle>) -> Result<Self> {
        let instance = Self {
            name: None,
            circles,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.circles.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 circles, got {}",
                self.circles.len()
            )));
        }
        for (i, c) in self.circles.iter().enumerate() {
            c.check(i)?;
        }
        Ok(())
    }

    /// Applies `x -> s * x + (dx, dy)` to every center and `r -> s * r` to every radius.
    pub fn transformed(&self, scale: f64, dx: f64, dy: f64) -> Instance {
        Instance {
            name: self.name.clone(),
            circles: self
                .circles
                .iter()
                .map(|c| {
                    Circle::new(
                        scale * c.center_x + dx,
                        scale * c.center_y + dy,
                        scale * c.radius,
                    )
                })
                .collect(),
        }
    }
}

/// Phase-1 result: circle order starting at circle 0 and one slot per circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTour {
    pub order: Vec<usize>,
    /// Indexed by circle, not by tour position.
    pub slots: Vec<usize>,
    pub k: usize,
    pub length: f64,
}

/// Final output: order, one point per circle, and per-edge lengths along the cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSolution {
    pub order: Vec<usize>,
    /// Indexed by circle.
    pub points: Vec<Point>,
    /// `edge_lengths[i]` joins `order[i]` and `order[(i + 1) % N]`.
    pub edge_lengths: Vec<f64>,
    pub total: f64,
}

impl ContinuousSolution {
    /// Builds a solution from an order and points, computing edge lengths and total.
    pub fn from_points(order: Vec<usize>, points: Vec<Point>) -> Self {
        let n = order.len();
        let edge_lengths: Vec<f64> = (0..n)
            .map(|i| points[order[i]].dist(points[order[(i + 1) % n]]))
            .collect();
        let total = edge_lengths.iter().sum();
        Self {
            order,
            points,
            edge_lengths,
            total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactDp,
    CuttingPlane,
    Heuristic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactDp => "exact-dp",
            Method::CuttingPlane => "cutting-plane",
            Method::Heuristic => "heuristic",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact-dp" => Ok(Method::ExactDp),
            "cutting-plane" => Ok(Method::CuttingPlane),
            "heuristic" => Ok(Method::Heuristic),
            other => Err(format!(
                "unknown method '{other}' (expected exact-dp, cutting-plane or heuristic)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorMode {
    /// Each point ranges over its whole disk.
    FullDisk,
    /// Each point is further confined to the bounding box of its phase-1 sector.
    SectorBox,
}

impl SectorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SectorMode::FullDisk => "full-disk",
            SectorMode::SectorBox => "sector-box",
        }
    }
}

impl std::str::FromStr for SectorMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full-disk" => Ok(SectorMode::FullDisk),
            "sector-box" => Ok(SectorMode::SectorBox),
            other => Err(format!(
                "unknown sector mode '{other}' (expected full-disk or sector-box)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Discretization slots per circle.
    pub k: usize,
    pub method: Method,
    pub sector_mode: SectorMode,
    /// Largest N accepted by the exact dynamic program.
    pub exact_limit: usize,
    /// Relative improvement per sweep below which coordinate descent stops.
    pub descent_tol: f64,
    pub descent_max_sweeps: usize,
    pub seed: u64,
    /// Wall-clock budget in seconds for the cutting-plane search.
    pub time_limit: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 4,
            method: Method::ExactDp,
            sector_mode: SectorMode::FullDisk,
            exact_limit: 16,
            descent_tol: 1e-10,
            descent_max_sweeps: 10_000,
            seed: 0,
            time_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if self.exact_limit < 2 {
            return Err(Error::InvalidConfig("exact_limit must be >= 2".into()));
        }
        if self.descent_tol.is_nan() || self.descent_tol <= 0.0 {
            return Err(Error::InvalidConfig("descent_tol must be > 0".into()));
        }
        if let Some(t) = self.time_limit {
            if t.is_nan() || t < 0.0 {
                return Err(Error::InvalidConfig("time_limit must be >= 0".into()));
            }
        }
        Ok(())
    }
}

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub const fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            xmin,
            ymin,
            xmax,
            ymax,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateParams {
    pub n: usize,
    pub center_box: Rect,
    /// Inclusive `[min, max]` radius range.
    pub radius_range: (f64, f64),
    pub seed: u64,
    /// Minimum distance between any two centers.
    pub min_center_gap: Option<f64>,
}

/// Rejection-sampling budget per circle when `min_center_gap` is set.
pub const PLACEMENT_ATTEMPTS: usize = 10_000;

/// Draws a seeded random instance. The same parameters give the same instance
/// on every platform.
pub fn generate_instance(params: &GenerateParams) -> Result<Instance> {
    let GenerateParams {
        n,
        center_box: b,
        radius_range: (rmin, rmax),
        seed,
        min_center_gap,
    } = *params;
    if n < 2 {
        return Err(Error::InvalidInstance(format!(
            "need at least 2 circles, got {n}"
        )));
    }
    let finite = [b.xmin, b.xmax, b.ymin, b.ymax, rmin, rmax]
        .iter()
        .all(|v| v.is_finite());
    if !finite || b.xmin > b.xmax || b.ymin > b.ymax {
        return Err(Error::Generation(format!("bad center box {b:?}")));
    }
    if rmin < 0.0 || rmin > rmax {
        return Err(Error::Generation(format!(
            "bad radius range [{rmin}, {rmax}]"
        )));
    }
    let gap = min_center_gap.unwrap_or(0.0);
    if !(gap >= 0.0 && gap.is_finite()) {
        return Err(Error::Generation(format!("bad min_center_gap {gap}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circles: Vec<Circle> = Vec::with_capacity(n);
    for i in 0..n {
        let mut placed = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let x = rng.gen_range(b.xmin..=b.xmax);
            let y = rng.gen_range(b.ymin..=b.ymax);
            let p = Point::new(x, y);
            if gap == 0.0 || circles.iter().all(|c| c.center().dist(p) >= gap) {
                placed = Some(p);
                break;
            }
        }
        let Some(p) = placed else {
            return Err(Error::Generation(format!(
                "could not place circle {i} with center gap {gap} after {PLACEMENT_ATTEMPTS} attempts"
            )));
        };
        let r = rng.gen_range(rmin..=rmax);
        circles.push(Circle::new(p.x, p.y, r));
    }
    Ok(Instance {
        name: Some(format!("gen-n{n}-s{seed}")),
        circles,
    })
}

/// Pretty JSON text for an instance, newline terminated.
pub fn instance_to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(instance).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str, path: &Path) -> Result<Instance> {
    let instance: Instance = serde_json::from_str(text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    instance.validate()?;
    Ok(instance)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(instance)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    instance_from_json(&text, path)
}
