//! C interface to `femwind`.
//!
//! Objects are opaque heap handles created by `fw_*_new`/`fw_terrain_*`
//! functions and released by the matching `*_free`. Every fallible call
//! returns an [`FwStatus`]; on failure the message is available from
//! [`fw_last_error`] on the same thread. Panics never cross the boundary.
//!
//! Arrays use the library's node order: `i` fastest, then `j`, then `k`.
//! Wind arrays are interleaved `u v w` per cell.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use femwind::io::{read_terrain_ascii_grid, write_vtk_structured};
use femwind::mesh::{generate_levels, synthetic_terrain};
use femwind::{
    downscale, CycleParams, DownscaleRequest, DownscaleResult, Error, LevelProfile, MultiplierField,
    PenaltyTensor, TerrainKind, TerrainSurface, WindField, WindSpec,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    InvalidMesh = 5,
    Diverged = 6,
    Io = 7,
    Parse = 8,
    Internal = 9,
    Panic = 10,
}

/// Synthetic terrain shapes for [`fw_terrain_synthetic`].
pub const FW_TERRAIN_FLAT: c_int = 0;
pub const FW_TERRAIN_HILL: c_int = 1;
pub const FW_TERRAIN_RIDGE: c_int = 2;

/// Ground elevation grid.
pub struct FwTerrain {
    inner: TerrainSurface,
}

/// Downscaling inputs; defaults to zero uniform wind, unit penalty and the
/// default solver settings.
pub struct FwRequest {
    inner: DownscaleRequest,
}

/// Adjusted wind, multiplier and solve report.
pub struct FwResult {
    inner: DownscaleResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FwStatus {
    match e {
        Error::InvalidArgument(_) | Error::Config { .. } | Error::InvalidProfile { .. } => FwStatus::InvalidArgument,
        Error::DimensionMismatch(_) => FwStatus::DimensionMismatch,
        Error::Unsupported(_) => FwStatus::Unsupported,
        Error::TopBelowTerrain { .. } | Error::SingularElement { .. } => FwStatus::InvalidMesh,
        Error::Diverged { .. } => FwStatus::Diverged,
        Error::Io { .. } => FwStatus::Io,
        Error::Parse { .. } => FwStatus::Parse,
        _ => FwStatus::Internal,
    }
}

struct Failure(FwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FwStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FwStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FwStatus::Panic
        }
    }
}

unsafe fn out_ptr<'a, T>(p: *mut *mut T, what: &str) -> Result<&'a mut *mut T, Failure> {
    let out = p.as_mut().ok_or_else(|| null(what))?;
    *out = ptr::null_mut();
    Ok(out)
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Failure(FwStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn publish<T>(out: &mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn fw_status_string(status: FwStatus) -> *const c_char {
    let s: &'static CStr = match status {
        FwStatus::Ok => c"ok",
        FwStatus::NullPointer => c"null pointer",
        FwStatus::InvalidArgument => c"invalid argument",
        FwStatus::DimensionMismatch => c"dimension mismatch",
        FwStatus::Unsupported => c"unsupported configuration",
        FwStatus::InvalidMesh => c"invalid mesh",
        FwStatus::Diverged => c"solver diverged",
        FwStatus::Io => c"i/o error",
        FwStatus::Parse => c"parse error",
        FwStatus::Internal => c"internal error",
        FwStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Synthetic terrain (`FW_TERRAIN_*`) with the lower-left node at the origin. `amplitude` and
/// `width` are ignored for flat terrain; hills and ridges are centered.
#[no_mangle]
pub unsafe extern "C" fn fw_terrain_synthetic(
    kind: c_int,
    n1: usize,
    n2: usize,
    d1: f64,
    d2: f64,
    amplitude: f64,
    width: f64,
    out: *mut *mut FwTerrain,
) -> FwStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let kind = match kind {
            FW_TERRAIN_FLAT => TerrainKind::Flat,
            FW_TERRAIN_HILL => TerrainKind::GaussianHill {
                amplitude,
                sigma: width,
                center: None,
            },
            FW_TERRAIN_RIDGE => TerrainKind::Ridge {
                amplitude,
                sigma: width,
                center_x: None,
            },
            other => {
                return Err(Failure(FwStatus::InvalidArgument, format!("unknown terrain kind {other}")));
            }
        };
        publish(out, FwTerrain { inner: synthetic_terrain(kind, n1, n2, d1, d2)? });
        Ok(())
    })
}

/// Terrain from `n1 * n2` node elevations, `i` fastest.
#[no_mangle]
pub unsafe extern "C" fn fw_terrain_from_elevations(
    n1: usize,
    n2: usize,
    d1: f64,
    d2: f64,
    x0: f64,
    y0: f64,
    elevation: *const f64,
    len: usize,
    out: *mut *mut FwTerrain,
) -> FwStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let values = slice(elevation, len, "elevation")?.to_vec();
        publish(out, FwTerrain { inner: TerrainSurface::new(n1, n2, d1, d2, (x0, y0), values)? });
        Ok(())
    })
}

/// Terrain from an ESRI ASCII grid file.
#[no_mangle]
pub unsafe extern "C" fn fw_terrain_read_ascii_grid(path: *const c_char, out: *mut *mut FwTerrain) -> FwStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        publish(out, FwTerrain { inner: read_terrain_ascii_grid(path_arg(path)?)? });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fw_terrain_dims(terrain: *const FwTerrain, n1: *mut usize, n2: *mut usize) -> FwStatus {
    guard(|| {
        let t = &terrain.as_ref().ok_or_else(|| null("terrain"))?.inner;
        *n1.as_mut().ok_or_else(|| null("n1"))? = t.n1();
        *n2.as_mut().ok_or_else(|| null("n2"))? = t.n2();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fw_terrain_free(terrain: *mut FwTerrain) {
    if !terrain.is_null() {
        drop(Box::from_raw(terrain));
    }
}

/// New request over a copy of `terrain` with `n3` layers stretched by
/// `stretch_ratio` up to `top_height` above the lowest ground point.
#[no_mangle]
pub unsafe extern "C" fn fw_request_new(
    terrain: *const FwTerrain,
    n3: usize,
    top_height: f64,
    stretch_ratio: f64,
    out: *mut *mut FwRequest,
) -> FwStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = &terrain.as_ref().ok_or_else(|| null("terrain"))?.inner;
        let levels: LevelProfile = generate_levels(n3, top_height, stretch_ratio)?;
        publish(
            out,
            FwRequest {
                inner: DownscaleRequest {
                    terrain: t.clone(),
                    levels,
                    penalty: PenaltyTensor::identity(),
                    wind: WindSpec::Uniform([0.0; 3]),
                    params: CycleParams::default(),
                    warm_start: None,
                },
            },
        );
        Ok(())
    })
}

unsafe fn request<'a>(p: *mut FwRequest) -> Result<&'a mut DownscaleRequest, Failure> {
    Ok(&mut p.as_mut().ok_or_else(|| null("request"))?.inner)
}

#[no_mangle]
pub unsafe extern "C" fn fw_request_set_penalty(req: *mut FwRequest, a1: f64, a2: f64, a3: f64) -> FwStatus {
    guard(|| {
        let r = request(req)?;
        r.penalty = PenaltyTensor::new(a1, a2, a3)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fw_request_set_uniform_wind(req: *mut FwRequest, u: f64, v: f64, w: f64) -> FwStatus {
    guard(|| {
        if !(u.is_finite() && v.is_finite() && w.is_finite()) {
            return Err(Failure(FwStatus::InvalidArgument, "wind components must be finite".into()));
        }
        request(req)?.wind = WindSpec::Uniform([u, v, w]);
        Ok(())
    })
}

/// Log-law horizontal wind; `direction` is the heading in degrees
/// counterclockwise from `+x`.
#[no_mangle]
pub unsafe extern "C" fn fw_request_set_log_wind(
    req: *mut FwRequest,
    speed: f64,
    direction: f64,
    roughness_length: f64,
    reference_height: f64,
) -> FwStatus {
    guard(|| {
        request(req)?.wind = WindSpec::LogProfile {
            speed,
            direction,
            roughness_length,
            reference_height,
        };
        Ok(())
    })
}

/// Cell-center wind, `3 * cells` values interleaved `u v w`, `i` fastest.
#[no_mangle]
pub unsafe extern "C" fn fw_request_set_cell_wind(req: *mut FwRequest, uvw: *const f64, len: usize) -> FwStatus {
    guard(|| {
        let r = request(req)?;
        let cells = femwind::Dims::new(r.terrain.n1() - 1, r.terrain.n2() - 1, r.levels.n3());
        if len != 3 * cells.len() {
            return Err(Failure(
                FwStatus::DimensionMismatch,
                format!("expected {} values for {cells} cells, got {len}", 3 * cells.len()),
            ));
        }
        let values = slice(uvw, len, "uvw")?
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        r.wind = WindSpec::Cells(WindField::from_values(cells, values)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fw_request_set_solver(
    req: *mut FwRequest,
    pre_smooth: usize,
    post_smooth: usize,
    max_cycles: usize,
    rel_tol: f64,
) -> FwStatus {
    guard(|| {
        let r = request(req)?;
        let params = CycleParams {
            pre_smooth,
            post_smooth,
            max_cycles,
            rel_tol,
            ..r.params
        };
        params.validate()?;
        r.params = params;
        Ok(())
    })
}

/// Start the next solve from `lambda` (one value per node), or clear the warm
/// start when `lambda` is null.
#[no_mangle]
pub unsafe extern "C" fn fw_request_set_warm_start(req: *mut FwRequest, lambda: *const f64, len: usize) -> FwStatus {
    guard(|| {
        let r = request(req)?;
        if lambda.is_null() {
            r.warm_start = None;
            return Ok(());
        }
        let nodes = femwind::Dims::new(r.terrain.n1(), r.terrain.n2(), r.levels.n3() + 1);
        r.warm_start = Some(MultiplierField::from_values(nodes, slice(lambda, len, "lambda")?.to_vec())?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fw_request_free(req: *mut FwRequest) {
    if !req.is_null() {
        drop(Box::from_raw(req));
    }
}

/// Run the downscaling. On [`FwStatus::Diverged`] no result is produced.
#[no_mangle]
pub unsafe extern "C" fn fw_downscale(req: *const FwRequest, out: *mut *mut FwResult) -> FwStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let r = &req.as_ref().ok_or_else(|| null("request"))?.inner;
        publish(out, FwResult { inner: downscale(r)? });
        Ok(())
    })
}

unsafe fn result<'a>(p: *const FwResult) -> Result<&'a DownscaleResult, Failure> {
    Ok(&p.as_ref().ok_or_else(|| null("result"))?.inner)
}

/// Node counts; cells are one fewer in each direction.
#[no_mangle]
pub unsafe extern "C" fn fw_result_dims(res: *const FwResult, dims: *mut usize) -> FwStatus {
    guard(|| {
        let d = result(res)?.mesh.dims();
        if dims.is_null() {
            return Err(null("dims"));
        }
        std::slice::from_raw_parts_mut(dims, 3).copy_from_slice(&[d.n1, d.n2, d.n3]);
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize, what: &str) -> Result<(), Failure> {
    if len != src.len() {
        return Err(Failure(
            FwStatus::DimensionMismatch,
            format!("{what} has {} values, buffer holds {len}", src.len()),
        ));
    }
    if dst.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts_mut(dst, len).copy_from_slice(src);
    Ok(())
}

/// Copy the adjusted wind (`3 * cells` values) into `out`.
#[no_mangle]
pub unsafe extern "C" fn fw_result_wind(res: *const FwResult, out: *mut f64, len: usize) -> FwStatus {
    guard(|| {
        let flat: Vec<f64> = result(res)?.wind.values().iter().flatten().copied().collect();
        copy_out(&flat, out, len, "wind")
    })
}

/// Copy the multiplier (one value per node) into `out`.
#[no_mangle]
pub unsafe extern "C" fn fw_result_lambda(res: *const FwResult, out: *mut f64, len: usize) -> FwStatus {
    guard(|| copy_out(result(res)?.lambda.values(), out, len, "lambda"))
}

/// Solve summary: cycles run, convergence flag (0/1), rate and final
/// relative residual. Any output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn fw_result_report(
    res: *const FwResult,
    cycles: *mut usize,
    converged: *mut c_int,
    rate: *mut f64,
    final_residual: *mut f64,
) -> FwStatus {
    guard(|| {
        let r = &result(res)?.report;
        if let Some(c) = cycles.as_mut() {
            *c = r.cycles_used;
        }
        if let Some(c) = converged.as_mut() {
            *c = c_int::from(r.converged);
        }
        if let Some(v) = rate.as_mut() {
            *v = r.rate;
        }
        if let Some(v) = final_residual.as_mut() {
            *v = r.final_residual();
        }
        Ok(())
    })
}

/// Legacy VTK file with the mesh, `lambda` and the adjusted wind.
#[no_mangle]
pub unsafe extern "C" fn fw_result_write_vtk(res: *const FwResult, path: *const c_char) -> FwStatus {
    guard(|| {
        let r = result(res)?;
        write_vtk_structured(path_arg(path)?, &r.mesh, Some(&r.wind), Some(&r.lambda))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn fw_result_free(res: *mut FwResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}
