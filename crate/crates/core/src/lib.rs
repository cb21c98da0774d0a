//! Solvers for the traveling salesman problem with circle neighborhoods.
//!
//! Given `N` disks in the plane, choose one point inside each disk and a
//! visiting order so the closed tour through the chosen points is as short as
//! possible. The main route is two-phase:
//!
//! 1. discretize every circle into `k` arc-midpoint slots and solve the
//!    resulting generalized TSP ([`phase1`]), exactly or heuristically;
//! 2. keep the circle order fixed and move each point continuously inside its
//!    disk (optionally restricted to the phase-1 sector box) by cyclic
//!    coordinate descent ([`phase2`]).
//!
//! [`pipeline`] glues the phases together, checks solutions against the
//! original constraint system and computes a simple lower bound.

pub mod error;
pub mod geometry;
pub mod model;
pub mod phase1;
pub mod phase2;
pub mod pipeline;
pub mod render;

pub use error::{Error, Result};
pub use geometry::{DiscreteNode, Point, SectorBox};
pub use model::{
    generate_instance, load_instance, save_instance, Circle, ContinuousSolution, DiscreteTour,
    GenerateParams, Instance, Method, Rect, SectorMode, SolverConfig,
};
pub use pipeline::{
    solve_two_phase, validate_solution, SolutionFile, SolveReport, ValidationReport,
};
pub use render::{render_svg, RenderStyle};
