//! Command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::info;

use crate::error::{Error, Result};
use crate::io::{
    load_config, read_terrain_ascii_grid, read_wind_cells, write_report, write_vtk_structured, write_wind_cells,
    RunConfig, TerrainSource, WindSource,
};
use crate::mesh::{build_mesh, generate_levels, synthetic_terrain, validate_mesh, TerrainSurface};
use crate::mgsolver::SolveReport;
use crate::pipeline::{downscale, DownscaleRequest, WindSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "femwind", version, about = "Mass-consistent wind downscaling over terrain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Run configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override a configuration entry (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full downscale: write the adjusted wind and diagnostics.
    Solve(RunArgs),
    /// Build and validate the mesh, write it as VTK.
    Mesh(RunArgs),
    /// Solve and print the residual history and convergence rate only.
    Rate(RunArgs),
}

/// Terrain from the configured source, checked against `n1`, `n2`.
pub fn load_terrain(cfg: &RunConfig) -> Result<TerrainSurface> {
    let t = match &cfg.terrain {
        TerrainSource::File(path) => read_terrain_ascii_grid(path)?,
        TerrainSource::Synthetic { kind, d1, d2 } => synthetic_terrain(*kind, cfg.n1, cfg.n2, *d1, *d2)?,
    };
    if (t.n1(), t.n2()) != (cfg.n1, cfg.n2) {
        return Err(Error::DimensionMismatch(format!(
            "terrain has {}x{} nodes, config n1 x n2 is {}x{}",
            t.n1(),
            t.n2(),
            cfg.n1,
            cfg.n2
        )));
    }
    Ok(t)
}

/// Downscale request described by `cfg`.
pub fn build_request(cfg: &RunConfig) -> Result<DownscaleRequest> {
    let terrain = load_terrain(cfg)?;
    let levels = generate_levels(cfg.n3, cfg.top_height, cfg.stretch_ratio)?;
    let wind = match &cfg.wind {
        WindSource::Uniform(u) => WindSpec::Uniform(*u),
        &WindSource::LogProfile {
            speed,
            direction,
            roughness_length,
            reference_height,
        } => WindSpec::LogProfile {
            speed,
            direction,
            roughness_length,
            reference_height,
        },
        WindSource::File(path) => {
            let cells = crate::grid::Dims::new(cfg.n1 - 1, cfg.n2 - 1, cfg.n3);
            WindSpec::Cells(read_wind_cells(path, cells)?)
        }
    };
    Ok(DownscaleRequest {
        terrain,
        levels,
        penalty: cfg.penalty,
        wind,
        params: cfg.params,
        warm_start: None,
    })
}

fn init_logging(cfg: &RunConfig) {
    let _ = env_logger::Builder::new()
        .filter_level(cfg.log_level)
        .format_timestamp(None)
        .try_init();
    if cfg.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
            info!("thread pool already configured: {e}");
        }
    }
}

fn print_summary(out: &mut dyn Write, report: &SolveReport, seconds: f64) -> std::io::Result<()> {
    writeln!(out, "cycles: {}", report.cycles_used)?;
    writeln!(out, "converged: {}", report.converged)?;
    writeln!(out, "final residual: {:.3e}", report.final_residual())?;
    writeln!(out, "rate: {:.4}", report.rate)?;
    writeln!(out, "wall time: {seconds:.3} s")
}

fn print_history(out: &mut dyn Write, report: &SolveReport) -> std::io::Result<()> {
    for (c, r) in report.residual_history.iter().enumerate() {
        writeln!(out, "cycle {c:3}  residual {r:.6e}")?;
    }
    Ok(())
}

enum Outcome {
    Done,
    Diverged,
}

fn run(command: &Command, out: &mut dyn Write) -> Result<Outcome> {
    let (Command::Solve(args) | Command::Mesh(args) | Command::Rate(args)) = command;
    let cfg = load_config(&args.config, &args.set)?;
    init_logging(&cfg);
    let io_err = |e: std::io::Error| Error::io(Path::new("<stdout>"), e);
    let start = Instant::now();

    if let Command::Mesh(_) = command {
        let path = cfg.mesh_output.as_ref().ok_or_else(|| {
            Error::InvalidArgument("the `mesh` subcommand needs the `mesh_output` key".into())
        })?;
        let req = build_request(&cfg)?;
        let mesh = build_mesh(&req.terrain, &req.levels)?;
        let report = validate_mesh(&mesh);
        if let Some(issue) = report.issues.first() {
            return Err(Error::InvalidArgument(format!(
                "mesh is not valid ({} issues), first: {issue:?}",
                report.issues.len()
            )));
        }
        write_vtk_structured(path, &mesh, None, None)?;
        writeln!(out, "mesh: {} nodes, written to {}", mesh.dims(), path.display()).map_err(io_err)?;
        return Ok(Outcome::Done);
    }

    let req = build_request(&cfg)?;
    let result = match downscale(&req) {
        Ok(r) => r,
        Err(Error::Diverged { report }) => {
            if let (Command::Solve(_), Some(path)) = (command, &cfg.diagnostics_output) {
                write_report(path, &report, None)?;
            }
            if let Command::Rate(_) = command {
                print_history(out, &report).map_err(io_err)?;
            }
            print_summary(out, &report, start.elapsed().as_secs_f64()).map_err(io_err)?;
            return Ok(Outcome::Diverged);
        }
        Err(e) => return Err(e),
    };
    let secs = start.elapsed().as_secs_f64();
    match command {
        Command::Rate(_) => print_history(out, &result.report).map_err(io_err)?,
        _ => {
            write_wind_cells(&cfg.wind_output, &result.wind)?;
            if let Some(path) = &cfg.diagnostics_output {
                write_report(path, &result.report, Some(&result.diagnostics))?;
            }
            if let Some(path) = &cfg.mesh_output {
                write_vtk_structured(path, &result.mesh, Some(&result.wind), Some(&result.lambda))?;
            }
        }
    }
    print_summary(out, &result.report, secs).map_err(io_err)?;
    Ok(if result.report.converged { Outcome::Done } else { Outcome::Diverged })
}

/// Parse `args` (including the program name) and run; returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match run(&cli.command, out) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Diverged) => {
            let _ = writeln!(err, "error: solver did not converge");
            EXIT_DIVERGED
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
