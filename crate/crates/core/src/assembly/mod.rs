//! Finite element assembly of the multiplier problem
//!
//! ```text
//! ∫ A⁻¹ ∇λ · ∇μ = -∫ ∇μ · u0   for all μ vanishing on the lateral and top faces
//! ```
//!
//! with trilinear hexahedra, plus recovery of the adjusted wind
//! `u = u0 + A⁻¹ ∇λ` at cell centers.

pub mod element;
mod fields;
mod stencil;

use rayon::prelude::*;

pub use fields::{MultiplierField, RhsField, WindField};
pub use stencil::StencilOperator;

use crate::error::{Error, Result};
use crate::grid::{stencil_slot, vertex_offset, Dims};
use crate::mesh::StructuredMesh;

use element::{center_gradient, element_rhs, element_stiffness, physical_gradients, singular, CENTER_WEIGHT};

/// Diagonal penalty `A = diag(a1², a2², a3²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyTensor {
    a: [f64; 3],
}

impl PenaltyTensor {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("a3", a3)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "penalty {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { a: [a1, a2, a3] })
    }

    pub fn identity() -> Self {
        Self { a: [1.0; 3] }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.a
    }

    /// Diagonal of `A⁻¹`.
    pub fn inverse_diagonal(&self) -> [f64; 3] {
        [
            1.0 / (self.a[0] * self.a[0]),
            1.0 / (self.a[1] * self.a[1]),
            1.0 / (self.a[2] * self.a[2]),
        ]
    }
}

fn check_wind(mesh: &StructuredMesh, u0: &WindField) -> Result<()> {
    if u0.dims() != mesh.cell_dims() {
        return Err(Error::DimensionMismatch(format!(
            "wind field has {} cells, mesh has {}",
            u0.dims(),
            mesh.cell_dims()
        )));
    }
    Ok(())
}

/// Accumulate one layer of cells into the stencil rows of its two node
/// layers. `coeff` and `rhs` start at node layer `k`.
fn assemble_layer(
    mesh: &StructuredMesh,
    penalty: &PenaltyTensor,
    u0: &WindField,
    k: usize,
    coeff: &mut [f64],
    rhs: &mut [f64],
) -> Result<()> {
    let d = mesh.dims();
    let plane = d.n1 * d.n2;
    for j in 0..d.n2 - 1 {
        for i in 0..d.n1 - 1 {
            let coords = mesh.cell_coords(i, j, k);
            let ke = element_stiffness(&coords, penalty).map_err(|(g, det)| singular((i, j, k), g, det))?;
            let fe = element_rhs(&coords, u0.get(i, j, k)).map_err(|det| singular((i, j, k), 8, det))?;
            for a in 0..8 {
                let (ai, aj, ak) = vertex_offset(a);
                let p = (i + ai) + d.n1 * (j + aj) + plane * ak;
                rhs[p] += fe[a];
                let row = &mut coeff[27 * p..27 * p + 27];
                for b in 0..8 {
                    let (bi, bj, bk) = vertex_offset(b);
                    let slot = stencil_slot(
                        bi as isize - ai as isize,
                        bj as isize - aj as isize,
                        bk as isize - ak as isize,
                    );
                    row[slot] += ke[a][b];
                }
            }
        }
    }
    Ok(())
}

/// Global stiffness and right-hand side before any boundary treatment.
///
/// Cell layers of equal parity touch disjoint node layers and are assembled
/// in parallel; even layers go first, so each node's accumulation order is
/// fixed regardless of thread count.
pub fn assemble_unconstrained(
    mesh: &StructuredMesh,
    penalty: &PenaltyTensor,
    u0: &WindField,
) -> Result<(StencilOperator, RhsField)> {
    check_wind(mesh, u0)?;
    let d = mesh.dims();
    let plane = d.n1 * d.n2;
    let layers = d.n3 - 1;
    let mut coeff = vec![0.0; 27 * d.len()];
    let mut rhs = vec![0.0; d.len()];

    let first_error = |results: Vec<Result<()>>| results.into_iter().find(|r| r.is_err()).unwrap_or(Ok(()));

    let even: Vec<Result<()>> = coeff
        .par_chunks_mut(2 * 27 * plane)
        .zip(rhs.par_chunks_mut(2 * plane))
        .enumerate()
        .filter(|(m, _)| 2 * m < layers)
        .map(|(m, (c, r))| assemble_layer(mesh, penalty, u0, 2 * m, c, r))
        .collect();
    first_error(even)?;

    let (_, coeff_rest) = coeff.split_at_mut(27 * plane);
    let (_, rhs_rest) = rhs.split_at_mut(plane);
    let odd: Vec<Result<()>> = coeff_rest
        .par_chunks_mut(2 * 27 * plane)
        .zip(rhs_rest.par_chunks_mut(2 * plane))
        .enumerate()
        .filter(|(m, _)| 2 * m + 1 < layers)
        .map(|(m, (c, r))| assemble_layer(mesh, penalty, u0, 2 * m + 1, c, r))
        .collect();
    first_error(odd)?;

    let op = StencilOperator::new(d, coeff, vec![false; d.len()]);
    Ok((op, RhsField { dims: d, values: rhs }))
}

/// Impose `λ = 0` on the lateral and top faces by symmetric elimination.
pub fn apply_dirichlet(op: StencilOperator, rhs: &mut RhsField) -> StencilOperator {
    let d = op.dims();
    let mask = d.dirichlet_mask();
    for (f, m) in rhs.values.iter_mut().zip(&mask) {
        if *m {
            *f = 0.0;
        }
    }
    let coeff = op.coefficients().to_vec();
    let mut op = StencilOperator::new(d, coeff, mask);
    op.eliminate_masked();
    op
}

/// Assembled operator and right-hand side with boundary conditions applied.
pub fn assemble(
    mesh: &StructuredMesh,
    penalty: &PenaltyTensor,
    u0: &WindField,
) -> Result<(StencilOperator, RhsField)> {
    let (op, mut rhs) = assemble_unconstrained(mesh, penalty, u0)?;
    let op = apply_dirichlet(op, &mut rhs);
    Ok((op, rhs))
}

/// `Kx` for a multiplier field.
pub fn apply_operator(op: &StencilOperator, x: &MultiplierField) -> Result<Vec<f64>> {
    if x.dims() != op.dims() {
        return Err(Error::DimensionMismatch(format!(
            "field {} vs operator {}",
            x.dims(),
            op.dims()
        )));
    }
    let mut y = vec![0.0; x.values().len()];
    op.apply(x.values(), &mut y)?;
    Ok(y)
}

/// Absolute and relative l2 residual over free nodes.
pub fn residual_norm(op: &StencilOperator, x: &MultiplierField, f: &RhsField) -> Result<(f64, f64)> {
    op.residual_norm(x.values(), f.values())
}

fn cell_values(dims: Dims, values: &[f64], i: usize, j: usize, k: usize) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (a, v) in out.iter_mut().enumerate() {
        let (oi, oj, ok) = vertex_offset(a);
        *v = values[dims.idx(i + oi, j + oj, k + ok)];
    }
    out
}

/// `u = u0 + A⁻¹ ∇λ`, with `∇λ` evaluated at each cell center.
pub fn recover_wind(
    mesh: &StructuredMesh,
    lambda: &MultiplierField,
    u0: &WindField,
    penalty: &PenaltyTensor,
) -> Result<WindField> {
    check_wind(mesh, u0)?;
    let d = mesh.dims();
    if lambda.dims() != d {
        return Err(Error::DimensionMismatch(format!(
            "multiplier field {} vs mesh {d}",
            lambda.dims()
        )));
    }
    let c = d.cells();
    let inv = penalty.inverse_diagonal();
    let plane = c.n1 * c.n2;
    let mut out = vec![[0.0; 3]; c.len()];
    let results: Vec<Result<()>> = out
        .par_chunks_mut(plane)
        .enumerate()
        .map(|(k, layer)| {
            for j in 0..c.n2 {
                for i in 0..c.n1 {
                    let coords = mesh.cell_coords(i, j, k);
                    let g = center_gradient(&coords, &cell_values(d, lambda.values(), i, j, k))
                        .map_err(|det| singular((i, j, k), 8, det))?;
                    let u = u0.get(i, j, k);
                    layer[i + c.n1 * j] = [u[0] + inv[0] * g[0], u[1] + inv[1] * g[1], u[2] + inv[2] * g[2]];
                }
            }
            Ok(())
        })
        .collect();
    results.into_iter().find(|r| r.is_err()).unwrap_or(Ok(()))?;
    WindField::from_values(c, out)
}

/// One-point quadrature weak divergence `Σ_cells 8 |det J(0)| ∇μ(0) · u_cell`
/// for every node basis function `μ`. Dirichlet nodes are included; callers
/// restrict to free nodes as needed.
pub fn weak_divergence(mesh: &StructuredMesh, wind: &WindField) -> Result<Vec<f64>> {
    check_wind(mesh, wind)?;
    let d = mesh.dims();
    let c = d.cells();
    let mut out = vec![0.0; d.len()];
    for k in 0..c.n3 {
        for j in 0..c.n2 {
            for i in 0..c.n1 {
                let coords = mesh.cell_coords(i, j, k);
                let (grads, det) = physical_gradients(&coords, [0.0; 3]).map_err(|det| singular((i, j, k), 8, det))?;
                let u = wind.get(i, j, k);
                let w = CENTER_WEIGHT * det;
                for (a, g) in grads.iter().enumerate() {
                    let (oi, oj, ok) = vertex_offset(a);
                    out[d.idx(i + oi, j + oj, k + ok)] += w * (g[0] * u[0] + g[1] * u[1] + g[2] * u[2]);
                }
            }
        }
    }
    Ok(out)
}
