//! Subcommand definitions and their drivers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use topokit::lpvi::{lpvi, LpviConfig};
use topokit::optimizer::{
    iteration_bound, optimize, verify_lemma2, verify_lemma3, OptimizerConfig, StepSize, StopReason,
};
use topokit::par::Execution;
use topokit::persistence::{alpha_filtration, compute_persistence};
use topokit::persloss::{persloss_gradient_with, persloss_with, DEFAULT_MAX_POINTS};
use topokit::TopoError;

use crate::io::{self, LpviSummary, ParseError, PersLossReport};
use crate::svg;

pub mod exit {
    pub const OK: i32 = 0;
    pub const WRITE: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const GEOMETRY: i32 = 3;
    pub const LPVI: i32 = 4;
    pub const IMAGE: i32 = 5;
    pub const VERIFY: i32 = 6;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    fn new(code: i32, msg: impl Into<String>) -> Self {
        Self { code, msg: msg.into() }
    }

    fn parse(path: &Path, e: ParseError) -> Self {
        Self::new(exit::PARSE, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<TopoError> for CliError {
    fn from(e: TopoError) -> Self {
        let code = match e {
            TopoError::CloudTooSmall { .. } | TopoError::KTooLarge { .. } => exit::LPVI,
            TopoError::DimensionMismatch(_) | TopoError::ImageTooSmall(_) => exit::IMAGE,
            TopoError::InvalidInput(_) => exit::PARSE,
            _ => exit::GEOMETRY,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "topokit",
    version,
    about = "Persistent homology tools for point clouds, images and toy optimisation problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Alpha persistence diagram of a point cloud.
    Ph(PhArgs),
    /// Densify a 3D cloud by local Voronoi interpolation.
    Lpvi(LpviArgs),
    /// Persistence loss between a rendered and a ground-truth image.
    Persloss(PerslossArgs),
    /// Run the topology-aware optimizer on a toy problem and check its descent bounds.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
pub struct PhArgs {
    /// XYZ or ASCII PLY cloud.
    #[arg(long)]
    pub input: PathBuf,
    /// Diagram CSV (dim,birth,death).
    #[arg(long)]
    pub output: PathBuf,
    /// Persistence diagram plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Barcode plot.
    #[arg(long)]
    pub barcode_svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LpviArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Augmented cloud: originals (flag 0) then additions (flag 1).
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 8)]
    pub k_prime: usize,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Candidates beyond this many neighbourhood radii are dropped.
    #[arg(long, default_value_t = 2.0)]
    pub locality: f64,
    /// Evaluate neighbourhoods one at a time.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct PerslossArgs {
    /// Rendered image (plain PPM).
    #[arg(long)]
    pub rendered: PathBuf,
    /// Ground-truth image (plain PPM).
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k0: usize,
    #[arg(long, default_value_t = 1)]
    pub k1: usize,
    #[arg(long, default_value_t = 0)]
    pub k2: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    pub max_points: usize,
    /// JSON report.
    #[arg(long)]
    pub output: PathBuf,
    /// Gradient CSV, one line per image row.
    #[arg(long)]
    pub gradient: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaArg(pub StepSize);

impl FromStr for EtaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Self(StepSize::Auto));
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Self(StepSize::Fixed(v))),
            _ => Err(format!("expected 'auto' or a positive step size, got {s:?}")),
        }
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Trace CSV, one row per iteration.
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// `auto` or a fixed step size.
    #[arg(long, default_value = "auto")]
    pub eta: EtaArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iters: usize,
    /// Iterations between configuration refreshes.
    #[arg(long, default_value_t = 200)]
    pub refresh_period: usize,
    /// Seeds the start point of problems without `initial` values.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::new(exit::PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::new(exit::WRITE, format!("{}: {e}", path.display())))
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

/// Runs a subcommand and returns a one-line summary for standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Ph(a) => cmd_ph(a),
        Command::Lpvi(a) => cmd_lpvi(a),
        Command::Persloss(a) => cmd_persloss(a),
        Command::Optimize(a) => cmd_optimize(a),
    }
}

pub fn cmd_ph(a: &PhArgs) -> Result<String, CliError> {
    let cloud = io::parse_cloud(&read(&a.input)?).map_err(|e| CliError::parse(&a.input, e))?;
    let fc = alpha_filtration(&cloud).map_err(|e| CliError::new(exit::GEOMETRY, e.to_string()))?;
    let d = compute_persistence(&fc).map_err(|e| CliError::new(exit::GEOMETRY, e.to_string()))?;
    write(&a.output, &io::write_diagram_csv(&d))?;
    if let Some(p) = &a.svg {
        write(p, &svg::diagram_svg(&d))?;
    }
    if let Some(p) = &a.barcode_svg {
        write(p, &svg::barcode_svg(&d))?;
    }
    let counts: Vec<String> = (0..=d.max_dim()).map(|k| format!("H{k}={}", d.in_dim(k).count())).collect();
    Ok(format!("points={} simplices={} pairs={} {}", cloud.len(), fc.len(), d.len(), counts.join(" ")))
}

pub fn cmd_lpvi(a: &LpviArgs) -> Result<String, CliError> {
    let cloud = io::parse_cloud(&read(&a.input)?).map_err(|e| CliError::parse(&a.input, e))?;
    if cloud.dim() != 3 {
        return Err(CliError::new(exit::LPVI, format!("{}: LPVI needs a 3D cloud", a.input.display())));
    }
    let cfg = LpviConfig {
        k: a.k,
        k_prime: a.k_prime,
        tau: a.tau,
        locality_factor: a.locality,
        execution: execution(a.sequential),
    };
    let (out, report) = lpvi(&cloud, &cfg)?;
    let flags: Vec<u8> = (0..out.len()).map(|i| u8::from(i >= cloud.len())).collect();
    write(&a.output, &io::write_xyz(&out, Some(&flags)))?;
    write(&a.report, &io::write_lpvi_report(&LpviSummary::from(&report)))?;
    Ok(format!(
        "accepted_3d={} fallback_2d={} skipped={} points_added={}",
        report.accepted_3d, report.fallback_2d, report.skipped, report.points_added
    ))
}

pub fn cmd_persloss(a: &PerslossArgs) -> Result<String, CliError> {
    let rendered = io::parse_ppm(&read(&a.rendered)?).map_err(|e| CliError::parse(&a.rendered, e))?;
    let gt = io::parse_ppm(&read(&a.gt)?).map_err(|e| CliError::parse(&a.gt, e))?;
    if (rendered.height(), rendered.width()) != (gt.height(), gt.width()) {
        return Err(CliError::new(
            exit::IMAGE,
            format!(
                "rendered image is {}×{} but ground truth is {}×{}",
                rendered.width(),
                rendered.height(),
                gt.width(),
                gt.height()
            ),
        ));
    }
    let k = [a.k0, a.k1, a.k2];
    let exec = execution(a.sequential);
    let report = match &a.gradient {
        Some(path) => {
            let (v, g) = persloss_gradient_with(&rendered, &gt, k, a.max_points, exec)?;
            write(path, &io::write_gradient_csv(&g))?;
            PersLossReport::new(&v, k, a.max_points, &rendered, Some(&g))
        }
        None => {
            let v = persloss_with(&rendered, &gt, k, a.max_points, exec)?;
            PersLossReport::new(&v, k, a.max_points, &rendered, None)
        }
    };
    write(&a.output, &report.to_json())?;
    Ok(format!("total={}", topokit::format::format_float(report.total)))
}

pub fn cmd_optimize(a: &OptimizeArgs) -> Result<String, CliError> {
    let problem = io::parse_problem(&read(&a.problem)?).map_err(|e| CliError::parse(&a.problem, e))?;
    let cfg = OptimizerConfig {
        lambda_topo: a.lambda,
        epsilon: a.epsilon,
        eta: a.eta.0,
        max_iters: a.max_iters,
        persloss_period: a.refresh_period,
        seed: a.seed,
    };
    let out = optimize(&problem, &cfg)?;
    write(&a.trace, &out.trace.to_csv())?;
    if let Some(p) = &a.svg {
        write(p, &svg::trace_svg(&out.trace))?;
    }
    let l2 = verify_lemma2(&out.trace, out.trace.eta).iter().filter(|&&ok| !ok).count();
    let l3 = verify_lemma3(&out.trace, &out.constants).iter().filter(|&&ok| !ok).count();
    let stop = match out.stop {
        StopReason::Converged => "converged".to_string(),
        StopReason::MaxIters => "max_iters".to_string(),
        StopReason::NonFiniteLoss(t) => format!("non_finite_loss@{t}"),
    };
    let summary = format!(
        "stop={stop} iterations={} bound={} eta={} lemma2_failures={l2} lemma3_failures={l3}",
        out.trace.len(),
        iteration_bound(&out.constants, a.epsilon),
        topokit::format::format_float(out.trace.eta),
    );
    if l2 + l3 > 0 {
        return Err(CliError::new(exit::VERIFY, format!("descent checks failed: {summary}")));
    }
    Ok(summary)
}
