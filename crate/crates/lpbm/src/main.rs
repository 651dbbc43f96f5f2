//! Thin command-line front end over the lpbm library. Each subcommand reads
//! and writes the JSON formats from `lpbm::io`, prints a one-line summary
//! with the effective parameter values, and maps errors to exit codes:
//! 2 usage, 3 violated precondition, 4 non-convergence (report still
//! written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use lpbm::blaschke;
use lpbm::body::{AnyBody, Polytope};
use lpbm::error::LpbmError;
use lpbm::io;
use lpbm::minkowski::{self, SolverConfig};
use lpbm::spherical::{DirectionGrid, DiscreteMeasure};
use lpbm::transform;
use lpbm::verify;

#[derive(Parser)]
#[command(name = "lpbm", version, about = "Lp-Brunn-Minkowski toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GridArgs {
    /// Ambient dimension (2 or 3).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Direction count (dim 2) or minimum vertex count (dim 3).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Input measure JSON.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Solve the volume-normalized problem (default).
    #[arg(long, conflicts_with = "plain")]
    normalized: bool,
    /// Solve the plain (unnormalized) problem.
    #[arg(long)]
    plain: bool,
    #[arg(long = "emit-polygon")]
    emit_polygon: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Input body JSON (vertex or facet form).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    out: PathBuf,
    /// Output sampling resolution; defaults to 360 (dim 2) or 2562 (dim 3).
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    out: PathBuf,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, conflicts_with = "plain")]
    normalized: bool,
    #[arg(long)]
    plain: bool,
    #[arg(long = "emit-polygon")]
    emit_polygon: Option<PathBuf>,
}

#[derive(Args)]
struct SumArgs {
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// The two input body JSON files, given as two --in flags.
    #[arg(long = "in", num_args = 1, action = clap::ArgAction::Append)]
    input: Vec<PathBuf>,
    #[arg(long = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, conflicts_with = "plain")]
    normalized: bool,
    #[arg(long)]
    plain: bool,
}

#[derive(Args)]
struct RotateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    out: PathBuf,
    #[arg(long = "emit-polygon")]
    emit_polygon: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimensions to check; repeatable.
    #[arg(long = "dim", num_args = 1, action = clap::ArgAction::Append)]
    dims: Vec<usize>,
    /// Exponents to check; repeatable.
    #[arg(long = "p", num_args = 1, action = clap::ArgAction::Append)]
    p_values: Vec<f64>,
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a direction grid and write its Lebesgue measure.
    Grid(GridArgs),
    /// Solve the even Lp-Minkowski problem for a measure.
    Solve(SolveArgs),
    /// Sample an Lp-projection-body support function.
    Projection(TransformArgs),
    /// Sample an Lp-centroid-body support function.
    Centroid(TransformArgs),
    /// Sample an Lp-moment-body support function.
    Moment(TransformArgs),
    /// Compute the (normalized) Lp-curvature image of a body.
    CurvatureImage(CurvatureArgs),
    /// Blaschke-combine two origin-symmetric bodies.
    BlaschkeSum(SumArgs),
    /// Rotate a planar body by a quarter turn.
    Rotate90(RotateArgs),
    /// Run the deterministic property-check suite.
    Verify(VerifyArgs),
}

fn exit_code_for(e: &LpbmError) -> u8 {
    match e {
        LpbmError::NotConverged { .. } => 4,
        LpbmError::Io(_) | LpbmError::Json(_) | LpbmError::Invalid(_) => 2,
        _ => 3,
    }
}

fn default_resolution(dim: usize) -> usize {
    if dim == 2 {
        360
    } else {
        2562
    }
}

fn grid_of(dim: usize, resolution: Option<usize>) -> lpbm::error::Result<Arc<DirectionGrid>> {
    let res = resolution.unwrap_or_else(|| default_resolution(dim));
    Ok(Arc::new(DirectionGrid::build(dim, res)?))
}

fn load_body(path: &Path) -> lpbm::error::Result<Polytope> {
    io::polytope_from_json(&io::read_to_string(path)?)
}

fn load_measure(path: &Path) -> lpbm::error::Result<DiscreteMeasure> {
    io::measure_from_json(&io::read_to_string(path)?)
}

fn maybe_emit_polygon(
    body: &Polytope,
    target: &Option<PathBuf>,
) -> lpbm::error::Result<()> {
    if let Some(path) = target {
        io::write_string(path, &io::polygon_to_csv(body)?)?;
    }
    Ok(())
}

fn report_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "solve".into());
    name.push_str(".report.json");
    out.with_file_name(name)
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let fail = |e: LpbmError| (exit_code_for(&e), e.to_string());
    match cli.command {
        Command::Grid(a) => {
            let grid = grid_of(a.dim, a.resolution).map_err(fail)?;
            let measure = DiscreteMeasure::lebesgue(&grid);
            io::write_string(&a.out, &io::measure_to_json(&measure).map_err(fail)?)
                .map_err(fail)?;
            println!(
                "grid: dim={} resolution={} directions={} total_mass={:.6} out={}",
                a.dim,
                a.resolution.unwrap_or_else(|| default_resolution(a.dim)),
                grid.len(),
                measure.total_mass(),
                a.out.display()
            );
            Ok(())
        }
        Command::Solve(a) => {
            let mu = load_measure(&a.input).map_err(fail)?;
            let cfg = SolverConfig {
                residual_tol: a.tol,
                ..SolverConfig::default()
            };
            let normalized = !a.plain;
            let (body, report) = if normalized {
                minkowski::solve_normalized_even(&mu, a.p, &cfg).map_err(fail)?
            } else {
                minkowski::solve_even(&mu, a.p, &cfg).map_err(fail)?
            };
            io::write_string(&a.out, &io::polytope_to_json(&body).map_err(fail)?)
                .map_err(fail)?;
            let rpath = report_path(&a.out);
            io::write_string(&rpath, &io::report_to_json(&report).map_err(fail)?)
                .map_err(fail)?;
            maybe_emit_polygon(&body, &a.emit_polygon).map_err(fail)?;
            println!(
                "solve: dim={} p={} normalized={} tol={:e} iterations={} residual={:.3e} converged={} out={} report={}",
                mu.dim(),
                a.p,
                normalized,
                a.tol,
                report.iterations,
                report.final_residual,
                report.converged,
                a.out.display(),
                rpath.display()
            );
            if !report.converged {
                return Err((
                    4,
                    format!(
                        "solver did not converge (residual {:.3e}); report at {}",
                        report.final_residual,
                        rpath.display()
                    ),
                ));
            }
            Ok(())
        }
        Command::Projection(a) => {
            let k = load_body(&a.input).map_err(fail)?;
            let grid = grid_of(k.dim(), a.resolution).map_err(fail)?;
            let img = transform::projection_body(&k, a.p, a.tau, &grid).map_err(fail)?;
            io::write_string(&a.out, &io::sampled_to_json(&img).map_err(fail)?)
                .map_err(fail)?;
            println!(
                "projection: dim={} p={} tau={} resolution={} mean_support={:.6} out={}",
                k.dim(),
                a.p,
                a.tau,
                grid.len(),
                img.mean_support(),
                a.out.display()
            );
            Ok(())
        }
        Command::Centroid(a) => {
            let k = load_body(&a.input).map_err(fail)?;
            let grid = grid_of(k.dim(), a.resolution).map_err(fail)?;
            let img = transform::centroid_body(&k, a.p, &grid).map_err(fail)?;
            io::write_string(&a.out, &io::sampled_to_json(&img).map_err(fail)?)
                .map_err(fail)?;
            println!(
                "centroid: dim={} p={} resolution={} mean_support={:.6} out={}",
                k.dim(),
                a.p,
                grid.len(),
                img.mean_support(),
                a.out.display()
            );
            Ok(())
        }
        Command::Moment(a) => {
            let k = load_body(&a.input).map_err(fail)?;
            let grid = grid_of(k.dim(), a.resolution).map_err(fail)?;
            let img = transform::moment_body(&k, a.p, a.tau, &grid).map_err(fail)?;
            io::write_string(&a.out, &io::sampled_to_json(&img).map_err(fail)?)
                .map_err(fail)?;
            println!(
                "moment: dim={} p={} tau={} resolution={} mean_support={:.6} out={}",
                k.dim(),
                a.p,
                a.tau,
                grid.len(),
                img.mean_support(),
                a.out.display()
            );
            Ok(())
        }
        Command::CurvatureImage(a) => {
            let k = load_body(&a.input).map_err(fail)?;
            let grid = grid_of(k.dim(), a.resolution).map_err(fail)?;
            let cfg = SolverConfig {
                residual_tol: a.tol,
                ..SolverConfig::default()
            };
            let normalized = !a.plain;
            let mu = blaschke::curvature_data(&k, a.p, &grid).map_err(fail)?;
            let (solved, report) =
                minkowski::solve_normalized_even(&mu, a.p, &cfg).map_err(fail)?;
            let body = if normalized {
                solved
            } else {
                if (a.p - k.dim() as f64).abs() <= 1e-6 {
                    return Err(fail(LpbmError::ExponentEqualsDim(a.p)));
                }
                let v = solved.volume();
                solved.dilated(v.powf(1.0 / (a.p - k.dim() as f64)))
            };
            io::write_string(&a.out, &io::polytope_to_json(&body).map_err(fail)?)
                .map_err(fail)?;
            let rpath = report_path(&a.out);
            io::write_string(&rpath, &io::report_to_json(&report).map_err(fail)?)
                .map_err(fail)?;
            maybe_emit_polygon(&body, &a.emit_polygon).map_err(fail)?;
            println!(
                "curvature-image: dim={} p={} normalized={} resolution={} tol={:e} iterations={} residual={:.3e} out={} report={}",
                k.dim(),
                a.p,
                normalized,
                grid.len(),
                a.tol,
                report.iterations,
                report.final_residual,
                a.out.display(),
                rpath.display()
            );
            if !report.converged {
                return Err((
                    4,
                    format!(
                        "solver did not converge (residual {:.3e}); report at {}",
                        report.final_residual,
                        rpath.display()
                    ),
                ));
            }
            Ok(())
        }
        Command::BlaschkeSum(a) => {
            if a.input.len() != 2 {
                return Err((2, "blaschke-sum needs exactly two --in files".into()));
            }
            let k = load_body(&a.input[0]).map_err(fail)?;
            let l = load_body(&a.input[1]).map_err(fail)?;
            let cfg = SolverConfig {
                residual_tol: a.tol,
                ..SolverConfig::default()
            };
            let normalized = !a.plain;
            let body = if normalized {
                blaschke::normalized_blaschke_sum(&k, &l, a.p, &cfg).map_err(fail)?
            } else {
                blaschke::blaschke_sum(&k, &l, a.p, &cfg).map_err(fail)?
            };
            io::write_string(&a.out, &io::polytope_to_json(&body).map_err(fail)?)
                .map_err(fail)?;
            println!(
                "blaschke-sum: dim={} p={} normalized={} tol={:e} volume={:.6} out={}",
                k.dim(),
                a.p,
                normalized,
                a.tol,
                body.volume(),
                a.out.display()
            );
            Ok(())
        }
        Command::Rotate90(a) => {
            let text = io::read_to_string(&a.input).map_err(fail)?;
            let (out_text, dim, polygon) = match io::polytope_from_json(&text) {
                Ok(p) => {
                    let rotated = blaschke::rotate_quarter(&AnyBody::Polytope(p)).map_err(fail)?;
                    let poly = match &rotated {
                        AnyBody::Polytope(q) => Some(q.clone()),
                        AnyBody::Sampled(_) => None,
                    };
                    (io::body_to_json(&rotated).map_err(fail)?, 2, poly)
                }
                Err(_) => {
                    let s = io::sampled_from_json(&text).map_err(fail)?;
                    let rotated = blaschke::rotate_quarter(&AnyBody::Sampled(s)).map_err(fail)?;
                    (io::body_to_json(&rotated).map_err(fail)?, 2, None)
                }
            };
            io::write_string(&a.out, &out_text).map_err(fail)?;
            if let Some(p) = &polygon {
                maybe_emit_polygon(p, &a.emit_polygon).map_err(fail)?;
            }
            println!("rotate90: dim={} out={}", dim, a.out.display());
            Ok(())
        }
        Command::Verify(a) => {
            let dims = if a.dims.is_empty() { vec![2, 3] } else { a.dims };
            let p_values = if a.p_values.is_empty() {
                vec![1.5, 2.0, 3.0]
            } else {
                a.p_values
            };
            let results = verify::run_suite(a.seed, &dims, &p_values);
            let passed = results.iter().filter(|r| r.passed).count();
            let failed = results.len() - passed;
            if let Some(out) = &a.out {
                let mut text = serde_json::to_string_pretty(&results)
                    .map_err(|e| (2, e.to_string()))?;
                text.push('\n');
                io::write_string(out, &text).map_err(fail)?;
            }
            for r in &results {
                println!(
                    "  [{}] {} measured={:.3e} tolerance={:.3e} {}",
                    if r.passed { "pass" } else { "FAIL" },
                    r.check_name,
                    r.measured,
                    r.tolerance,
                    r.notes
                );
            }
            println!(
                "verify: seed={} dims={:?} p={:?} checks={} passed={} failed={}",
                a.seed,
                dims,
                p_values,
                results.len(),
                passed,
                failed
            );
            if failed > 0 {
                return Err((1, format!("{failed} checks failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
