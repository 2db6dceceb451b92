//! Gauss-Seidel in vertical columns, bottom to top, with the columns split
//! into four horizontal color groups by `(i mod 2, j mod 2)`.
//!
//! A 27-point row only reaches horizontal neighbors at distance one, so no two
//! columns of one color read each other's nodes. Rows `j` of a color are
//! therefore updated in parallel; the result is identical to the sequential
//! order.

use rayon::prelude::*;

use crate::assembly::StencilOperator;
use crate::error::{Error, Result};

/// Color groups in sweep order.
pub const COLORS: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

#[derive(Clone, Copy)]
struct SharedSlice(*mut f64);

// SAFETY: writes through the pointer go to disjoint columns of one color, and
// reads only touch columns of other colors or the writer's own column.
unsafe impl Send for SharedSlice {}
unsafe impl Sync for SharedSlice {}

fn sweep_row(op: &StencilOperator, x: SharedSlice, f: &[f64], ci: usize, j: usize) -> Result<()> {
    let d = op.dims();
    for i in (ci..d.n1).step_by(2) {
        for k in 0..d.n3 {
            let p = d.idx(i, j, k);
            if op.is_dirichlet(p) {
                continue;
            }
            let diag = op.diagonal(p);
            if !(diag > 0.0) {
                return Err(Error::OperatorCorrupt { node: p, value: diag });
            }
            // SAFETY: indices come from the operator's own neighbor table and
            // are in bounds; see `SharedSlice` for the aliasing argument.
            let off = op.off_diagonal_with(i, j, k, |q| unsafe { *x.0.add(q) });
            unsafe { *x.0.add(p) = (f[p] - off) / diag };
        }
    }
    Ok(())
}

/// One full sweep over all four color groups.
pub fn gauss_seidel_sweep(op: &StencilOperator, x: &mut [f64], f: &[f64]) -> Result<()> {
    let d = op.dims();
    if x.len() != d.len() || f.len() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "smoother on {d} got {} unknowns and {} right-hand side values",
            x.len(),
            f.len()
        )));
    }
    let shared = SharedSlice(x.as_mut_ptr());
    for (ci, cj) in COLORS {
        let rows: Vec<usize> = (cj..d.n2).step_by(2).collect();
        let results: Vec<Result<()>> = rows
            .par_iter()
            .map(|&j| sweep_row(op, shared, f, ci, j))
            .collect();
        results.into_iter().find(|r| r.is_err()).unwrap_or(Ok(()))?;
    }
    Ok(())
}

/// Sweep `count` times.
pub fn smooth(op: &StencilOperator, x: &mut [f64], f: &[f64], count: usize) -> Result<()> {
    for _ in 0..count {
        gauss_seidel_sweep(op, x, f)?;
    }
    Ok(())
}
