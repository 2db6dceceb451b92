//! End-to-end downscaling: mesh, assembly, multigrid solve and wind recovery.

use log::info;

use crate::assembly::{assemble, recover_wind, weak_divergence, MultiplierField, PenaltyTensor, WindField};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, validate_mesh, LevelProfile, StructuredMesh, TerrainSurface};
use crate::mgsolver::{build_hierarchy, solve, CycleParams, Level, SolveReport};

/// Initial wind description.
#[derive(Debug, Clone, PartialEq)]
pub enum WindSpec {
    Uniform([f64; 3]),
    /// Horizontal log-law profile `U ln(z/z0) / ln(z_ref/z0)` with `z`
    /// measured above the local ground. `direction` is the heading the wind
    /// blows toward, in degrees counterclockwise from `+x`.
    LogProfile {
        speed: f64,
        direction: f64,
        roughness_length: f64,
        reference_height: f64,
    },
    /// Cell-center field supplied by the caller.
    Cells(WindField),
}

/// Everything needed to run one downscaling.
#[derive(Debug, Clone)]
pub struct DownscaleRequest {
    pub terrain: TerrainSurface,
    pub levels: LevelProfile,
    pub penalty: PenaltyTensor,
    pub wind: WindSpec,
    pub params: CycleParams,
    pub warm_start: Option<MultiplierField>,
}

/// Weak-divergence summary over free nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassConsistency {
    pub l2: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// One-point weak divergence of the adjusted cell wind.
    pub divergence: MassConsistency,
    /// Same functional applied to the initial wind.
    pub initial_divergence: MassConsistency,
    /// Largest componentwise change `|u - u0|`.
    pub max_change: f64,
}

#[derive(Debug, Clone)]
pub struct DownscaleResult {
    pub mesh: StructuredMesh,
    pub initial_wind: WindField,
    pub wind: WindField,
    pub lambda: MultiplierField,
    pub report: SolveReport,
    pub diagnostics: Diagnostics,
}

/// Cell-center wind from `spec` on `mesh`.
pub fn initialize_wind(mesh: &StructuredMesh, spec: &WindSpec) -> Result<WindField> {
    let c = mesh.cell_dims();
    match spec {
        WindSpec::Uniform(u) => WindField::uniform(c, *u),
        WindSpec::Cells(field) => {
            if field.dims() != c {
                return Err(Error::DimensionMismatch(format!(
                    "initial wind has {} cells, mesh has {c}",
                    field.dims()
                )));
            }
            Ok(field.clone())
        }
        &WindSpec::LogProfile {
            speed,
            direction,
            roughness_length: z0,
            reference_height: zref,
        } => {
            if !(z0 > 0.0 && zref > z0 && speed.is_finite() && direction.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "log profile needs 0 < roughness_length < reference_height, got z0={z0}, z_ref={zref}"
                )));
            }
            let (s, co) = direction.to_radians().sin_cos();
            let denom = (zref / z0).ln();
            let mut values = Vec::with_capacity(c.len());
            for k in 0..c.n3 {
                for j in 0..c.n2 {
                    for i in 0..c.n1 {
                        let ground = 0.25
                            * (mesh.node(i, j, 0)[2]
                                + mesh.node(i + 1, j, 0)[2]
                                + mesh.node(i, j + 1, 0)[2]
                                + mesh.node(i + 1, j + 1, 0)[2]);
                        let height = mesh.cell_center(i, j, k)[2] - ground;
                        if !(height > z0) {
                            return Err(Error::InvalidProfile { i, j, k, height, z0 });
                        }
                        let u = log_speed(speed, height, z0, denom);
                        values.push([u * co, u * s, 0.0]);
                    }
                }
            }
            WindField::from_values(c, values)
        }
    }
}

fn log_speed(speed: f64, height: f64, z0: f64, denom: f64) -> f64 {
    speed * (height / z0).ln() / denom
}

/// Log-law speed at `height` above ground.
pub fn log_profile_speed(speed: f64, height: f64, roughness_length: f64, reference_height: f64) -> f64 {
    log_speed(
        speed,
        height,
        roughness_length,
        (reference_height / roughness_length).ln(),
    )
}

/// One-point weak divergence of `wind` tested against every free node.
pub fn mass_consistency(mesh: &StructuredMesh, wind: &WindField) -> Result<MassConsistency> {
    let d = mesh.dims();
    let div = weak_divergence(mesh, wind)?;
    let mut l2 = 0.0;
    let mut max: f64 = 0.0;
    for (p, v) in div.iter().enumerate() {
        let (i, j, k) = d.coords(p);
        if !d.is_dirichlet(i, j, k) {
            l2 += v * v;
            max = max.max(v.abs());
        }
    }
    Ok(MassConsistency { l2: l2.sqrt(), max })
}

/// Closest mass-consistent wind to the request's initial wind.
pub fn downscale(request: &DownscaleRequest) -> Result<DownscaleResult> {
    let mesh = build_mesh(&request.terrain, &request.levels)?;
    let report = validate_mesh(&mesh);
    if let Some(issue) = report.issues.first() {
        return Err(Error::InvalidArgument(format!("mesh is not valid: {issue:?}")));
    }
    let u0 = initialize_wind(&mesh, &request.wind)?;
    downscale_on_mesh(mesh, u0, &request.penalty, &request.params, request.warm_start.as_ref())
}

/// [`downscale`] for a caller-built mesh and initial wind.
pub fn downscale_on_mesh(
    mesh: StructuredMesh,
    u0: WindField,
    penalty: &PenaltyTensor,
    params: &CycleParams,
    warm_start: Option<&MultiplierField>,
) -> Result<DownscaleResult> {
    let (op, rhs) = assemble(&mesh, penalty, &u0)?;
    let (h1, h2) = mesh.horizontal_spacing();
    let finest = Level::new(op, h1, h2, mesh.layer_thickness().to_vec())?;
    let hierarchy = build_hierarchy(finest, penalty, params)?;
    let dims: Vec<String> = hierarchy.level_dims().iter().map(|d| d.to_string()).collect();
    info!("hierarchy levels: {}", dims.join(" -> "));
    let (lambda, report) = solve(&hierarchy, &rhs, warm_start, params)?;
    let wind = recover_wind(&mesh, &lambda, &u0, penalty)?;
    let diagnostics = Diagnostics {
        divergence: mass_consistency(&mesh, &wind)?,
        initial_divergence: mass_consistency(&mesh, &u0)?,
        max_change: wind.max_abs_diff(&u0),
    };
    Ok(DownscaleResult {
        mesh,
        initial_wind: u0,
        wind,
        lambda,
        report,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_levels, synthetic_terrain, TerrainKind};

    fn flat_mesh() -> StructuredMesh {
        let t = synthetic_terrain(TerrainKind::Flat, 5, 5, 10.0, 10.0).unwrap();
        build_mesh(&t, &generate_levels(4, 100.0, 1.3).unwrap()).unwrap()
    }

    #[test]
    fn uniform_wind_everywhere() {
        let mesh = flat_mesh();
        let u = initialize_wind(&mesh, &WindSpec::Uniform([3.0, 0.0, 0.0])).unwrap();
        assert!(u.values().iter().all(|v| *v == [3.0, 0.0, 0.0]));
    }

    #[test]
    fn log_speed_identities() {
        assert_eq!(log_profile_speed(7.0, 10.0, 0.1, 10.0), 7.0);
        assert_eq!(log_profile_speed(7.0, 0.1, 0.1, 10.0), 0.0);
    }

    #[test]
    fn log_profile_direction_and_growth() {
        let mesh = flat_mesh();
        let spec = WindSpec::LogProfile {
            speed: 5.0,
            direction: 90.0,
            roughness_length: 0.5,
            reference_height: 20.0,
        };
        let u = initialize_wind(&mesh, &spec).unwrap();
        let c = u.dims();
        let mut prev = 0.0;
        for k in 0..c.n3 {
            let v = u.get(1, 1, k);
            assert!(v[0].abs() < 1e-12 && v[2] == 0.0);
            assert!(v[1] > prev);
            prev = v[1];
        }
    }

    #[test]
    fn log_profile_below_roughness() {
        let mesh = flat_mesh();
        let spec = WindSpec::LogProfile {
            speed: 5.0,
            direction: 0.0,
            roughness_length: 50.0,
            reference_height: 80.0,
        };
        assert!(matches!(
            initialize_wind(&mesh, &spec),
            Err(Error::InvalidProfile { k: 0, .. })
        ));
    }

    #[test]
    fn constant_wind_on_box_is_consistent() {
        let mesh = flat_mesh();
        let u = initialize_wind(&mesh, &WindSpec::Uniform([2.0, -1.0, 0.0])).unwrap();
        let mc = mass_consistency(&mesh, &u).unwrap();
        assert!(mc.max < 1e-12, "{mc:?}");
    }
}
