//! Terrain surfaces, vertical level profiles and terrain-following meshes.
//!
//! A mesh column starts at the ground and ends at a flat top plane placed
//! `top_height` above the lowest terrain point. Node heights in between are a
//! linear blend of the two, weighted by the normalized levels of a
//! [`LevelProfile`].

use crate::assembly::element::{jacobian, GAUSS_POINTS};
use crate::error::{Error, Result};
use crate::grid::Dims;

/// Gridded ground elevations over a uniform horizontal lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainSurface {
    n1: usize,
    n2: usize,
    d1: f64,
    d2: f64,
    origin: (f64, f64),
    elevation: Vec<f64>,
}

impl TerrainSurface {
    /// `elevation` is indexed `i + n1 * j`.
    pub fn new(
        n1: usize,
        n2: usize,
        d1: f64,
        d2: f64,
        origin: (f64, f64),
        elevation: Vec<f64>,
    ) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidArgument(format!(
                "terrain needs at least 2x2 nodes, got {n1}x{n2}"
            )));
        }
        if !(d1 > 0.0 && d1.is_finite() && d2 > 0.0 && d2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "terrain spacings must be positive and finite, got d1={d1}, d2={d2}"
            )));
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(Error::InvalidArgument("terrain origin must be finite".into()));
        }
        if elevation.len() != n1 * n2 {
            return Err(Error::DimensionMismatch(format!(
                "terrain {n1}x{n2} expects {} elevations, got {}",
                n1 * n2,
                elevation.len()
            )));
        }
        if let Some(p) = elevation.iter().position(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite elevation at ({}, {})",
                p % n1,
                p / n1
            )));
        }
        Ok(Self {
            n1,
            n2,
            d1,
            d2,
            origin,
            elevation,
        })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn elevations(&self) -> &[f64] {
        &self.elevation
    }

    pub fn elevation(&self, i: usize, j: usize) -> f64 {
        self.elevation[i + self.n1 * j]
    }

    pub fn min_elevation(&self) -> f64 {
        self.elevation.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_elevation(&self) -> f64 {
        self.elevation.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin.0 + i as f64 * self.d1
    }

    pub fn y(&self, j: usize) -> f64 {
        self.origin.1 + j as f64 * self.d2
    }
}

/// Shape of a synthetic test terrain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerrainKind {
    Flat,
    /// `a * exp(-((x-cx)^2 + (y-cy)^2) / (2 sigma^2))`; the center defaults to
    /// the middle of the domain.
    GaussianHill {
        amplitude: f64,
        sigma: f64,
        center: Option<(f64, f64)>,
    },
    /// Gaussian profile in `x`, constant along `y`.
    Ridge {
        amplitude: f64,
        sigma: f64,
        center_x: Option<f64>,
    },
}

/// Deterministic terrain for tests and demos, with the lower-left node at the
/// origin.
pub fn synthetic_terrain(
    kind: TerrainKind,
    n1: usize,
    n2: usize,
    d1: f64,
    d2: f64,
) -> Result<TerrainSurface> {
    let mid = (0.5 * (n1.max(1) - 1) as f64 * d1, 0.5 * (n2.max(1) - 1) as f64 * d2);
    let check = |amplitude: f64, sigma: f64| -> Result<()> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "terrain width sigma must be positive, got {sigma}"
            )));
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "terrain amplitude must be non-negative, got {amplitude}"
            )));
        }
        Ok(())
    };
    let mut elevation = vec![0.0; n1 * n2];
    match kind {
        TerrainKind::Flat => {}
        TerrainKind::GaussianHill {
            amplitude,
            sigma,
            center,
        } => {
            check(amplitude, sigma)?;
            let (cx, cy) = center.unwrap_or(mid);
            for j in 0..n2 {
                for i in 0..n1 {
                    let dx = i as f64 * d1 - cx;
                    let dy = j as f64 * d2 - cy;
                    elevation[i + n1 * j] =
                        amplitude * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
                }
            }
        }
        TerrainKind::Ridge {
            amplitude,
            sigma,
            center_x,
        } => {
            check(amplitude, sigma)?;
            let cx = center_x.unwrap_or(mid.0);
            for j in 0..n2 {
                for i in 0..n1 {
                    let dx = i as f64 * d1 - cx;
                    elevation[i + n1 * j] = amplitude * (-(dx * dx) / (2.0 * sigma * sigma)).exp();
                }
            }
        }
    }
    TerrainSurface::new(n1, n2, d1, d2, (0.0, 0.0), elevation)
}

/// Normalized vertical node levels `s[0] = 0 < ... < s[n3] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelProfile {
    s: Vec<f64>,
    top_height: f64,
    stretch_ratio: f64,
}

impl LevelProfile {
    /// Number of cell layers.
    pub fn n3(&self) -> usize {
        self.s.len() - 1
    }

    pub fn levels(&self) -> &[f64] {
        &self.s
    }

    pub fn top_height(&self) -> f64 {
        self.top_height
    }

    pub fn stretch_ratio(&self) -> f64 {
        self.stretch_ratio
    }
}

/// Geometric stretching: layer thicknesses `t, t r, t r^2, ...` summing to one.
pub fn generate_levels(n3: usize, top_height: f64, stretch_ratio: f64) -> Result<LevelProfile> {
    if n3 < 1 {
        return Err(Error::InvalidArgument("n3 must be at least 1".into()));
    }
    if !(top_height > 0.0 && top_height.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "top_height must be positive and finite, got {top_height}"
        )));
    }
    if !(stretch_ratio >= 1.0 && stretch_ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stretch_ratio must be finite and >= 1, got {stretch_ratio}"
        )));
    }
    let total: f64 = (0..n3).map(|k| stretch_ratio.powi(k as i32)).sum();
    let mut s = Vec::with_capacity(n3 + 1);
    s.push(0.0);
    let mut acc = 0.0;
    for k in 0..n3 - 1 {
        acc += stretch_ratio.powi(k as i32);
        s.push(acc / total);
    }
    s.push(1.0);
    Ok(LevelProfile {
        s,
        top_height,
        stretch_ratio,
    })
}

/// Node coordinates of a terrain-following hexahedral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredMesh {
    dims: Dims,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    h1: f64,
    h2: f64,
    h3: Vec<f64>,
}

impl StructuredMesh {
    /// Assemble a mesh from raw coordinate arrays without validation; pair
    /// with [`validate_mesh`].
    pub fn from_parts(
        dims: Dims,
        x: Vec<f64>,
        y: Vec<f64>,
        z: Vec<f64>,
        h1: f64,
        h2: f64,
        h3: Vec<f64>,
    ) -> Result<Self> {
        let n = dims.len();
        if x.len() != n || y.len() != n || z.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "mesh {dims} needs {n} coordinates per axis"
            )));
        }
        if dims.n1 < 2 || dims.n2 < 2 || dims.n3 < 2 {
            return Err(Error::InvalidArgument(format!("mesh {dims} has no cells")));
        }
        if h3.len() != dims.n3 - 1 {
            return Err(Error::DimensionMismatch(format!(
                "mesh {dims} needs {} layer thicknesses, got {}",
                dims.n3 - 1,
                h3.len()
            )));
        }
        Ok(Self {
            dims,
            x,
            y,
            z,
            h1,
            h2,
            h3,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn cell_dims(&self) -> Dims {
        self.dims.cells()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let p = self.dims.idx(i, j, k);
        [self.x[p], self.y[p], self.z[p]]
    }

    /// Horizontal spacings `(h1, h2)`.
    pub fn horizontal_spacing(&self) -> (f64, f64) {
        (self.h1, self.h2)
    }

    /// Layer thicknesses of the column at the lowest terrain point.
    pub fn layer_thickness(&self) -> &[f64] {
        &self.h3
    }

    /// The 8 vertices of cell `(i, j, k)` in local vertex order.
    #[inline]
    pub fn cell_coords(&self, i: usize, j: usize, k: usize) -> [[f64; 3]; 8] {
        let mut out = [[0.0; 3]; 8];
        for (a, v) in out.iter_mut().enumerate() {
            let (oi, oj, ok) = crate::grid::vertex_offset(a);
            *v = self.node(i + oi, j + oj, k + ok);
        }
        out
    }

    /// Mean of the 8 vertices of a cell.
    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let mut c = [0.0; 3];
        for v in self.cell_coords(i, j, k) {
            for d in 0..3 {
                c[d] += 0.125 * v[d];
            }
        }
        c
    }
}

/// Terrain-following mesh with a flat top at `min(elevation) + top_height`.
pub fn build_mesh(terrain: &TerrainSurface, levels: &LevelProfile) -> Result<StructuredMesh> {
    let base = terrain.min_elevation();
    let z_top = base + levels.top_height();
    for j in 0..terrain.n2() {
        for i in 0..terrain.n1() {
            let e = terrain.elevation(i, j);
            if e >= z_top {
                return Err(Error::TopBelowTerrain {
                    i,
                    j,
                    elevation: e,
                    top: z_top,
                });
            }
        }
    }
    let s = levels.levels();
    let dims = Dims::new(terrain.n1(), terrain.n2(), s.len());
    let n = dims.len();
    let (mut x, mut y, mut z) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (k, &sk) in s.iter().enumerate() {
        for j in 0..dims.n2 {
            for i in 0..dims.n1 {
                let p = dims.idx(i, j, k);
                let e = terrain.elevation(i, j);
                x[p] = terrain.x(i);
                y[p] = terrain.y(j);
                z[p] = if k + 1 == s.len() { z_top } else { e + (z_top - e) * sk };
            }
        }
    }
    let h3 = s.windows(2).map(|w| levels.top_height() * (w[1] - w[0])).collect();
    StructuredMesh::from_parts(dims, x, y, z, terrain.d1(), terrain.d2(), h3)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshIssue {
    /// `Z(i, j, k + 1) <= Z(i, j, k)`.
    NonMonotone { i: usize, j: usize, k: usize },
    /// Jacobian determinant `det <= 0` at Gauss point `point` of cell `(i, j, k)`.
    NonPositiveJacobian {
        i: usize,
        j: usize,
        k: usize,
        point: usize,
        det: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<MeshIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    /// Distinct cells with at least one bad Jacobian, in scan order.
    pub fn bad_cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for issue in &self.issues {
            if let MeshIssue::NonPositiveJacobian { i, j, k, .. } = *issue {
                if out.last() != Some(&(i, j, k)) {
                    out.push((i, j, k));
                }
            }
        }
        out
    }
}

pub fn validate_mesh(mesh: &StructuredMesh) -> ValidationReport {
    let d = mesh.dims();
    let mut issues = Vec::new();
    for k in 0..d.n3 - 1 {
        for j in 0..d.n2 {
            for i in 0..d.n1 {
                if mesh.z[d.idx(i, j, k + 1)] <= mesh.z[d.idx(i, j, k)] {
                    issues.push(MeshIssue::NonMonotone { i, j, k });
                }
            }
        }
    }
    let c = d.cells();
    for k in 0..c.n3 {
        for j in 0..c.n2 {
            for i in 0..c.n1 {
                let coords = mesh.cell_coords(i, j, k);
                for (point, g) in GAUSS_POINTS.iter().enumerate() {
                    let det = jacobian(&coords, *g).det;
                    if !(det > 0.0) {
                        issues.push(MeshIssue::NonPositiveJacobian { i, j, k, point, det });
                    }
                }
            }
        }
    }
    ValidationReport { issues }
}
