//! Command implementations behind the `tspcn` binary.
//!
//! Exit codes: 0 ok, 1 input or limit error, 2 usage error (raised by clap),
//! 3 time limit hit with a best-effort result written, 4 validation failure.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tspcn::{
    generate_instance, load_instance, render_svg, save_instance, solve_two_phase,
    validate_solution, GenerateParams, Instance, Method, Rect, RenderStyle, SectorMode,
    SolutionFile, SolverConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_TIME_LIMIT: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "tspcn",
    version,
    about = "Shortest closed tours through circle neighborhoods"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance file.
    Generate(GenerateArgs),
    /// Solve an instance with the two-phase method.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
    /// Draw an instance and solution as SVG.
    Render(RenderArgs),
    /// Run seeded benchmark suites.
    Bench(BenchArgs),
}

/// Comma-separated list of floats with a fixed arity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floats<const N: usize>(pub [f64; N]);

impl<const N: usize> FromStr for Floats<N> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != N {
            return Err(format!(
                "expected {N} comma-separated numbers, got {}",
                parts.len()
            ));
        }
        let mut out = [0.0f64; N];
        for (slot, p) in out.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| format!("not a number: {p:?}"))?;
            if !slot.is_finite() {
                return Err(format!("not finite: {p:?}"));
            }
        }
        Ok(Floats(out))
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of circles (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// Box for the centers as xmin,ymin,xmax,ymax.
    #[arg(long = "box", default_value = "0,0,100,100")]
    pub bbox: Floats<4>,
    /// Radius range as min,max.
    #[arg(long, default_value = "2,6")]
    pub radius: Floats<2>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Minimum distance between any two centers.
    #[arg(long)]
    pub min_gap: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value = "exact-dp")]
    pub method: Method,
    /// Slots per circle.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long = "sector", default_value = "full-disk")]
    pub sector_mode: SectorMode,
    /// Largest instance the exact dynamic program accepts.
    #[arg(long, default_value_t = 16)]
    pub exact_limit: usize,
    /// Wall-clock limit in seconds for the cutting-plane search.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Relative improvement below which descent stops.
    #[arg(long, default_value_t = 1e-10)]
    pub descent_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_sweeps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            k: self.k,
            method: self.method,
            sector_mode: self.sector_mode,
            exact_limit: self.exact_limit,
            descent_tol: self.descent_tol,
            descent_max_sweeps: self.max_sweeps,
            seed: self.seed,
            time_limit: self.time_limit,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG drawing here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Include wall-clock timings in the solution file.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 800)]
    pub canvas: u32,
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instance sizes.
    #[arg(long, value_delimiter = ',', default_value = "12,20,40,75")]
    pub sizes: Vec<usize>,
    /// Seeds per size (0..seeds).
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long = "sector", default_value = "full-disk")]
    pub sector_mode: SectorMode,
    #[arg(long, default_value_t = 16)]
    pub exact_limit: usize,
    /// Largest size solved with the cutting-plane method; above it the heuristic runs.
    #[arg(long, default_value_t = 20)]
    pub cutting_plane_limit: usize,
    /// Time limit in seconds for cutting-plane runs.
    #[arg(long, default_value_t = 600.0)]
    pub time_limit: f64,
    /// Emit CSV instead of a table.
    #[arg(long)]
    pub csv: bool,
}

/// Failure that maps to an exit code and a message on stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<tspcn::Error> for Failure {
    fn from(e: tspcn::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| input_error(format!("cannot write stdout: {e}"))),
    }
}

fn load_solution(path: &Path) -> Result<SolutionFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    Ok(SolutionFile::from_json(&text, path)?)
}

pub fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<i32, Failure> {
    let [xmin, ymin, xmax, ymax] = args.bbox.0;
    let [rmin, rmax] = args.radius.0;
    let params = GenerateParams {
        n: args.n as usize,
        center_box: Rect {
            xmin,
            ymin,
            xmax,
            ymax,
        },
        radius_range: (rmin, rmax),
        seed: args.seed,
        min_center_gap: args.min_gap,
    };
    let instance = generate_instance(&params)?;
    match &args.out {
        Some(p) => save_instance(&instance, p)?,
        None => write_output(None, &tspcn::model::instance_to_json(&instance))?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, Failure> {
    let instance = load_instance(&args.instance)?;
    let report = solve_two_phase(&instance, &args.solver.config())?;
    let file = report.to_file(args.timings);
    write_output(args.out.as_deref(), &file.to_json())?;
    if let Some(plot) = &args.plot {
        let svg = render_svg(&instance, &report.solution, &RenderStyle::default())?;
        write_output(Some(plot), &svg)?;
    }
    eprintln!(
        "{} circles, {} k={} {}: phase 1 {:.9}, refined {:.9} after {} sweeps",
        instance.len(),
        report.config.method.as_str(),
        report.config.k,
        report.config.sector_mode.as_str(),
        report.phase1.length,
        report.solution.total,
        report.sweeps
    );
    if report.time_limited {
        eprintln!(
            "time limit reached: discrete tour not proven optimal (bound {:.9})",
            report.discrete_lower_bound.unwrap_or(0.0)
        );
        return Ok(EXIT_TIME_LIMIT);
    }
    Ok(EXIT_OK)
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<i32, Failure> {
    let instance = load_instance(&args.instance)?;
    let file = load_solution(&args.solution)?;
    if file.points.len() != instance.len() {
        return Err(input_error(format!(
            "instance has {} circles but the solution has {} points",
            instance.len(),
            file.points.len()
        )));
    }
    let report = validate_solution(&instance, &file.solution(), args.tol);
    println!("{report}");
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_INVALID
    })
}

pub fn cmd_render(args: &RenderArgs) -> Result<i32, Failure> {
    let instance = load_instance(&args.instance)?;
    let file = load_solution(&args.solution)?;
    let style = RenderStyle {
        canvas_px: args.canvas,
        margin_frac: args.margin,
        ..RenderStyle::default()
    };
    let svg = render_svg(&instance, &file.solution(), &style)?;
    write_output(Some(&args.out), &svg)?;
    Ok(EXIT_OK)
}

/// One benchmark run. Config columns make each row reproducible on its own.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub seed: u64,
    pub method: &'static str,
    pub k: usize,
    pub sector_mode: &'static str,
    pub exact_limit: usize,
    pub time_limit: String,
    pub descent_tol: f64,
    pub max_sweeps: usize,
    pub length: String,
    pub phase1_length: String,
    pub lower_bound: String,
    /// `(length - lower_bound) / length`, clamped at 0; empty without a bound.
    pub gap: String,
    pub proven_optimal_discrete: bool,
    pub time_limited: bool,
    pub wall_s: String,
}

pub const BENCH_HEADER: [&str; 16] = [
    "n",
    "seed",
    "method",
    "k",
    "sector_mode",
    "exact_limit",
    "time_limit",
    "descent_tol",
    "max_sweeps",
    "length",
    "phase1_length",
    "lower_bound",
    "gap",
    "proven_optimal_discrete",
    "time_limited",
    "wall_s",
];

fn bench_method(n: usize, args: &BenchArgs) -> Method {
    if n <= args.exact_limit {
        Method::ExactDp
    } else if n <= args.cutting_plane_limit {
        Method::CuttingPlane
    } else {
        Method::Heuristic
    }
}

fn bench_row(n: usize, seed: u64, args: &BenchArgs) -> Result<BenchRow, Failure> {
    let instance: Instance = generate_instance(&GenerateParams {
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
    })?;
    let method = bench_method(n, args);
    let config = SolverConfig {
        k: args.k,
        method,
        sector_mode: args.sector_mode,
        exact_limit: args.exact_limit,
        seed,
        time_limit: (method == Method::CuttingPlane).then_some(args.time_limit),
        ..SolverConfig::default()
    };
    let started = Instant::now();
    let report = solve_two_phase(&instance, &config)?;
    let wall = started.elapsed().as_secs_f64();

    let length = report.solution.total;
    let (lower_bound, gap) = if report.lower_bound_computed {
        let g = if length > 0.0 {
            ((length - report.lower_bound) / length).max(0.0)
        } else {
            0.0
        };
        (format!("{:.9}", report.lower_bound), format!("{g:.9}"))
    } else {
        (String::new(), String::new())
    };
    Ok(BenchRow {
        n,
        seed,
        method: method.as_str(),
        k: config.k,
        sector_mode: config.sector_mode.as_str(),
        exact_limit: config.exact_limit,
        time_limit: config.time_limit.map(|t| t.to_string()).unwrap_or_default(),
        descent_tol: config.descent_tol,
        max_sweeps: config.descent_max_sweeps,
        length: format!("{length:.9}"),
        phase1_length: format!("{:.9}", report.phase1.length),
        lower_bound,
        gap,
        proven_optimal_discrete: report.proven_optimal_discrete,
        time_limited: report.time_limited,
        wall_s: format!("{wall:.3}"),
    })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, Failure> {
    if let Some(&n) = args.sizes.iter().find(|&&n| n < 2) {
        return Err(input_error(format!(
            "bench sizes must be at least 2, got {n}"
        )));
    }
    let mut out = io::stdout().lock();
    let io_err = |e: io::Error| input_error(format!("cannot write stdout: {e}"));
    let mut writer = args.csv.then(|| {
        csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(io::stdout())
    });
    if let Some(w) = writer.as_mut() {
        w.write_record(BENCH_HEADER)
            .map_err(|e| input_error(e.to_string()))?;
    } else {
        writeln!(
            out,
            "{:>4} {:>5} {:<14} {:>16} {:>16} {:>12} {:>9}",
            "n", "seed", "method", "length", "lower_bound", "gap", "wall_s"
        )
        .map_err(io_err)?;
    }
    for &n in &args.sizes {
        for seed in 0..args.seeds {
            let row = bench_row(n, seed, args)?;
            match writer.as_mut() {
                Some(w) => {
                    w.serialize(&row).map_err(|e| input_error(e.to_string()))?;
                    w.flush().map_err(io_err)?;
                }
                None => writeln!(
                    out,
                    "{:>4} {:>5} {:<14} {:>16} {:>16} {:>12} {:>9}",
                    row.n, row.seed, row.method, row.length, row.lower_bound, row.gap, row.wall_s
                )
                .map_err(io_err)?,
            }
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_parse_with_fixed_arity() {
        assert_eq!(
            "0, 1.5,2,3".parse::<Floats<4>>().unwrap(),
            Floats([0.0, 1.5, 2.0, 3.0])
        );
        assert!("1,2".parse::<Floats<4>>().is_err());
        assert!("1,x".parse::<Floats<2>>().is_err());
        assert!("1,inf".parse::<Floats<2>>().is_err());
    }

    #[test]
    fn bench_method_follows_size() {
        let args = BenchArgs::parse_from_defaults();
        assert_eq!(bench_method(12, &args), Method::ExactDp);
        assert_eq!(bench_method(20, &args), Method::CuttingPlane);
        assert_eq!(bench_method(75, &args), Method::Heuristic);
    }

    impl BenchArgs {
        fn parse_from_defaults() -> Self {
            match Cli::parse_from(["tspcn", "bench"]).command {
                Command::Bench(a) => a,
                _ => unreachable!(),
            }
        }
    }
}
