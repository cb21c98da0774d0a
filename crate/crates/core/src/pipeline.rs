//! Two-phase orchestration, solution validation and lower bounds.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{node_point, Point};
use crate::model::{
    Circle, ContinuousSolution, DiscreteTour, Instance, Method, SectorMode, SolverConfig,
};
use crate::phase1::{
    find_subtours, solve_cutting_plane, solve_exact_dp, solve_heuristic, successors,
};
use crate::phase2::{build_regions, sequence_refine, RefineOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub phase1_s: f64,
    pub phase2_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: ContinuousSolution,
    pub phase1: DiscreteTour,
    /// Bound on the continuous optimum from [`lower_bound`]; 0 when skipped.
    pub lower_bound: f64,
    pub lower_bound_computed: bool,
    /// Phase 1 was solved to proven optimality.
    pub proven_optimal_discrete: bool,
    /// Bound on the discrete optimum, when the phase-1 method provides one.
    pub discrete_lower_bound: Option<f64>,
    /// Phase 1 stopped on its time limit.
    pub time_limited: bool,
    pub sweeps: usize,
    pub timings: Timings,
    pub config: SolverConfig,
}

/// Circle order, successor map and slot choice carried from phase 1 to phase 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub order: Vec<usize>,
    /// `successor[i]` is the circle visited right after circle `i`.
    pub successor: Vec<usize>,
    pub slots: Vec<usize>,
}

pub fn extract_sequence(tour: &DiscreteTour) -> Sequence {
    Sequence {
        order: tour.order.clone(),
        successor: successors(&tour.order),
        slots: tour.slots.clone(),
    }
}

pub fn solve_two_phase(instance: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    instance.validate()?;
    config.validate()?;
    let started = Instant::now();
    let k = config.k;

    let (phase1, proven, discrete_lb, time_limited) = match config.method {
        Method::ExactDp => {
            let t = solve_exact_dp(instance, k, config.exact_limit)?;
            let len = t.length;
            (t, true, Some(len), false)
        }
        Method::CuttingPlane => {
            let limit = config.time_limit.map(Duration::from_secs_f64);
            let out = solve_cutting_plane(instance, k, limit)?;
            (
                out.tour,
                out.proven_optimal,
                Some(out.lower_bound),
                !out.proven_optimal,
            )
        }
        Method::Heuristic => (
            solve_heuristic(instance, k, config.seed)?,
            false,
            None,
            false,
        ),
    };
    let phase1_s = started.elapsed().as_secs_f64();

    let seq = extract_sequence(&phase1);
    let start: Vec<Point> = instance
        .circles
        .iter()
        .zip(&seq.slots)
        .map(|(c, &s)| node_point(c, s, k))
        .collect();
    // Full-disk refinement continues from the sector-box optimum, which is
    // feasible for the larger regions; descent is monotone, so the full-disk
    // total never exceeds the sector-box total.
    let boxed = build_regions(instance, &seq.slots, k, SectorMode::SectorBox);
    let mut refined = sequence_refine(
        instance,
        &seq.order,
        &start,
        &boxed,
        config.descent_tol,
        config.descent_max_sweeps,
    )?;
    if config.sector_mode == SectorMode::FullDisk {
        let disks = build_regions(instance, &seq.slots, k, SectorMode::FullDisk);
        let stage = sequence_refine(
            instance,
            &seq.order,
            &refined.solution.points,
            &disks,
            config.descent_tol,
            config.descent_max_sweeps,
        )?;
        refined = RefineOutcome {
            solution: stage.solution,
            sweeps: refined.sweeps + stage.sweeps,
        };
    }
    let total_s = started.elapsed().as_secs_f64();

    let bound = lower_bound(instance, config.exact_limit);
    Ok(SolveReport {
        solution: refined.solution,
        phase1,
        lower_bound: bound.value,
        lower_bound_computed: bound.computed,
        proven_optimal_discrete: proven,
        discrete_lower_bound: discrete_lb,
        time_limited,
        sweeps: refined.sweeps,
        timings: Timings {
            phase1_s,
            phase2_s: total_s - phase1_s,
            total_s,
        },
        config: config.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// False when the instance exceeds `exact_limit` and the bound was skipped.
    pub computed: bool,
}

/// `max(0, TSP(centers) - 2 * sum(r))`. Each tour edge satisfies
/// `|c_i - c_j| <= |p_i - p_j| + r_i + r_j`; summing around the cycle gives
/// the bound. Skipped (value 0) above `exact_limit` circles.
pub fn lower_bound(instance: &Instance, exact_limit: usize) -> LowerBound {
    if instance.len() > exact_limit {
        return LowerBound {
            value: 0.0,
            computed: false,
        };
    }
    let centers = Instance {
        name: None,
        circles: instance
            .circles
            .iter()
            .map(|c| Circle::new(c.center_x, c.center_y, 0.0))
            .collect(),
    };
    let tsp = solve_exact_dp(&centers, 1, exact_limit)
        .expect("centers instance is within the exact limit")
        .length;
    let radii: f64 = instance.circles.iter().map(|c| c.radius).sum();
    LowerBound {
        value: (tsp - 2.0 * radii).max(0.0),
        computed: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintFamily {
    /// Every circle entered and left exactly once.
    VisitOnce,
    /// One closed cycle; a consistent visiting sequence exists.
    SingleCycle,
    /// Each point inside its circle.
    DiskMembership,
    /// Each edge length equals the distance of its endpoints.
    EdgeLength,
    /// Stated total equals the sum of edge lengths.
    Total,
}

impl ConstraintFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintFamily::VisitOnce => "visit-once",
            ConstraintFamily::SingleCycle => "single-cycle",
            ConstraintFamily::DiskMembership => "disk-membership",
            ConstraintFamily::EdgeLength => "edge-length",
            ConstraintFamily::Total => "total",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintCheck {
    pub family: ConstraintFamily,
    pub passed: bool,
    pub max_residual: f64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ConstraintCheck>,
    pub recomputed_total: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, family: ConstraintFamily) -> &ConstraintCheck {
        self.checks
            .iter()
            .find(|c| c.family == family)
            .expect("every family is checked")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<16} max residual {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.family.name(),
                c.max_residual
            )?;
            for v in &c.violations {
                writeln!(f, "     {v}")?;
            }
        }
        write!(
            f,
            "{} overall (recomputed total {:.12})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.recomputed_total
        )
    }
}

struct CheckBuilder {
    family: ConstraintFamily,
    tol: f64,
    max_residual: f64,
    violations: Vec<String>,
}

impl CheckBuilder {
    fn new(family: ConstraintFamily, tol: f64) -> Self {
        Self {
            family,
            tol,
            max_residual: 0.0,
            violations: Vec::new(),
        }
    }

    fn residual(&mut self, r: f64, what: impl FnOnce() -> String) {
        if r.is_nan() || r > self.tol {
            self.violations
                .push(format!("{} (residual {r:.3e})", what()));
        }
        if r.is_nan() {
            self.max_residual = f64::NAN;
        } else if !self.max_residual.is_nan() {
            self.max_residual = self.max_residual.max(r);
        }
    }

    fn fail(&mut self, what: String) {
        self.violations.push(what);
        if !self.max_residual.is_nan() {
            self.max_residual = self.max_residual.max(1.0);
        }
    }

    fn finish(self) -> ConstraintCheck {
        ConstraintCheck {
            family: self.family,
            passed: self.violations.is_empty(),
            max_residual: self.max_residual,
            violations: self.violations,
        }
    }
}

/// Checks a solution against the original constraint system. Violations are
/// reported per family, never raised as errors.
pub fn validate_solution(
    instance: &Instance,
    solution: &ContinuousSolution,
    tolerance: f64,
) -> ValidationReport {
    let n = instance.len();
    let order = &solution.order;

    // entering and leaving counts
    let mut visit = CheckBuilder::new(ConstraintFamily::VisitOnce, tolerance);
    let mut counts = vec![0usize; n];
    for &c in order {
        if c < n {
            counts[c] += 1;
        } else {
            visit.fail(format!("order references circle {c}, instance has {n}"));
        }
    }
    for (c, &cnt) in counts.iter().enumerate() {
        if cnt != 1 {
            visit.fail(format!("circle {c} is visited {cnt} times"));
        }
    }
    let is_permutation = visit.violations.is_empty() && order.len() == n;
    let visit = visit.finish();

    let mut cycle = CheckBuilder::new(ConstraintFamily::SingleCycle, tolerance);
    if !is_permutation {
        cycle.fail("cannot evaluate: order is not a permutation of the circles".into());
    } else {
        let succ = successors(order);
        match find_subtours(&succ) {
            Ok(cycles) if cycles.len() == 1 => {}
            Ok(cycles) => cycle.fail(format!("{} subtours: {cycles:?}", cycles.len())),
            Err(e) => cycle.fail(e.to_string()),
        }
        // explicit sequence assignment: seq = position in the order, anchor excluded
        let anchor = order[0];
        let mut seq = vec![0i64; n];
        for (pos, &c) in order.iter().enumerate() {
            seq[c] = pos as i64 + 1;
        }
        let big_n = n as i64;
        for i in 0..n {
            let j = succ[i];
            if i == anchor || j == anchor || i == j {
                continue;
            }
            let lhs = seq[i] - seq[j] + big_n;
            if lhs > big_n - 1 {
                cycle.fail(format!(
                    "sequence inequality violated on arc {i}->{j}: {lhs} > {}",
                    big_n - 1
                ));
            }
        }
    }
    let cycle = cycle.finish();

    let mut disk = CheckBuilder::new(ConstraintFamily::DiskMembership, tolerance);
    if solution.points.len() != n {
        disk.fail(format!("{} points for {n} circles", solution.points.len()));
    } else {
        for (i, (p, c)) in solution.points.iter().zip(&instance.circles).enumerate() {
            let r = p.dist_sq(c.center()) - c.radius * c.radius;
            disk.residual(r.max(0.0), || {
                format!("circle {i}: point ({}, {}) outside", p.x, p.y)
            });
        }
    }
    let disk = disk.finish();

    let mut edges = CheckBuilder::new(ConstraintFamily::EdgeLength, tolerance);
    let mut recomputed_total = 0.0;
    if solution.edge_lengths.len() != order.len() {
        edges.fail(format!(
            "{} edge lengths for {} tour edges",
            solution.edge_lengths.len(),
            order.len()
        ));
    } else if solution.points.len() == n && order.iter().all(|&c| c < n) {
        let m = order.len();
        for i in 0..m {
            let (a, b) = (order[i], order[(i + 1) % m]);
            let d = solution.points[a].dist(solution.points[b]);
            recomputed_total += d;
            edges.residual((solution.edge_lengths[i] - d).abs(), || {
                format!(
                    "edge {a}->{b}: stated {} vs distance {d}",
                    solution.edge_lengths[i]
                )
            });
        }
    } else {
        edges.fail("cannot evaluate: points or order inconsistent with the instance".into());
    }
    let edges = edges.finish();

    let mut total = CheckBuilder::new(ConstraintFamily::Total, tolerance);
    let sum: f64 = solution.edge_lengths.iter().sum();
    total.residual((solution.total - sum).abs(), || {
        format!("stated total {} vs edge sum {sum}", solution.total)
    });
    if edges.passed {
        total.residual((solution.total - recomputed_total).abs(), || {
            format!(
                "stated total {} vs recomputed {recomputed_total}",
                solution.total
            )
        });
    }
    let total = total.finish();

    ValidationReport {
        checks: vec![visit, cycle, disk, edges, total],
        recomputed_total,
    }
}

/// JSON layout of a solution file. Report-only fields are optional so plain
/// solution files load too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub order: Vec<usize>,
    pub points: Vec<Point>,
    pub edge_lengths: Vec<f64>,
    pub total: f64,
    pub method: Method,
    pub k: usize,
    pub sector_mode: SectorMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase1_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase1_slots: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proven_optimal_discrete: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl SolutionFile {
    pub fn solution(&self) -> ContinuousSolution {
        ContinuousSolution {
            order: self.order.clone(),
            points: self.points.clone(),
            edge_lengths: self.edge_lengths.clone(),
            total: self.total,
        }
    }

    pub fn from_json(text: &str, path: &std::path::Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serializes");
        s.push('\n');
        s
    }
}

impl SolveReport {
    /// File form of the report. Timings are wall-clock and only written on
    /// request, so that default output is reproducible byte for byte.
    pub fn to_file(&self, include_timings: bool) -> SolutionFile {
        SolutionFile {
            order: self.solution.order.clone(),
            points: self.solution.points.clone(),
            edge_lengths: self.solution.edge_lengths.clone(),
            total: self.solution.total,
            method: self.config.method,
            k: self.config.k,
            sector_mode: self.config.sector_mode,
            phase1_length: Some(self.phase1.length),
            phase1_slots: Some(self.phase1.slots.clone()),
            lower_bound: self.lower_bound_computed.then_some(self.lower_bound),
            proven_optimal_discrete: Some(self.proven_optimal_discrete),
            timings: include_timings.then_some(self.timings),
        }
    }
}
