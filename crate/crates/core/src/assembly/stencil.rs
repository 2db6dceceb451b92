use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{slot_offset, Dims, CENTER};

/// Symmetric nodal operator stored as a 27-point stencil per node.
///
/// Row `p` keeps its coefficients in `coeff[27 p .. 27 p + 27]`, slot order
/// given by [`crate::grid::stencil_slot`]. Coefficients toward neighbors that
/// fall outside the grid are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilOperator {
    dims: Dims,
    coeff: Vec<f64>,
    mask: Vec<bool>,
    offsets: [isize; 27],
}

pub(crate) fn slot_strides(dims: Dims) -> [isize; 27] {
    let mut offsets = [0isize; 27];
    for (s, o) in offsets.iter_mut().enumerate() {
        let (di, dj, dk) = slot_offset(s);
        *o = di + dims.n1 as isize * (dj + dims.n2 as isize * dk);
    }
    offsets
}

impl StencilOperator {
    pub(crate) fn new(dims: Dims, coeff: Vec<f64>, mask: Vec<bool>) -> Self {
        debug_assert_eq!(coeff.len(), 27 * dims.len());
        debug_assert_eq!(mask.len(), dims.len());
        Self {
            dims,
            coeff,
            mask,
            offsets: slot_strides(dims),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_dirichlet(&self, p: usize) -> bool {
        self.mask[p]
    }

    pub fn free_count(&self) -> usize {
        self.mask.iter().filter(|m| !**m).count()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }

    pub(crate) fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeff
    }

    #[inline(always)]
    pub fn row(&self, p: usize) -> &[f64] {
        &self.coeff[27 * p..27 * p + 27]
    }

    #[inline(always)]
    pub fn diagonal(&self, p: usize) -> f64 {
        self.coeff[27 * p + CENTER]
    }

    /// Coefficient of row `p` toward its neighbor in `slot`.
    pub fn coefficient(&self, p: usize, slot: usize) -> f64 {
        self.coeff[27 * p + slot]
    }

    /// Flat index of the neighbor of `(i, j, k)` in `slot`, if it exists.
    #[inline]
    pub fn neighbor(&self, i: usize, j: usize, k: usize, slot: usize) -> Option<usize> {
        let (di, dj, dk) = slot_offset(slot);
        let d = self.dims;
        let ni = i as isize + di;
        let nj = j as isize + dj;
        let nk = k as isize + dk;
        if ni < 0 || nj < 0 || nk < 0 {
            return None;
        }
        let (ni, nj, nk) = (ni as usize, nj as usize, nk as usize);
        (ni < d.n1 && nj < d.n2 && nk < d.n3).then(|| d.idx(ni, nj, nk))
    }

    /// Off-diagonal part of row `(i, j, k)` applied to `x`.
    #[inline(always)]
    pub(crate) fn off_diagonal_dot(&self, x: &[f64], i: usize, j: usize, k: usize) -> f64 {
        self.off_diagonal_with(i, j, k, |q| x[q])
    }

    /// Same as [`Self::off_diagonal_dot`] with neighbor values read through `get`.
    #[inline(always)]
    pub(crate) fn off_diagonal_with(&self, i: usize, j: usize, k: usize, get: impl Fn(usize) -> f64) -> f64 {
        let d = self.dims;
        let p = d.idx(i, j, k);
        let row = self.row(p);
        let mut acc = 0.0;
        if i > 0 && j > 0 && k > 0 && i + 1 < d.n1 && j + 1 < d.n2 && k + 1 < d.n3 {
            for s in 0..27 {
                if s != CENTER {
                    acc += row[s] * get((p as isize + self.offsets[s]) as usize);
                }
            }
        } else {
            for s in 0..27 {
                if s == CENTER || row[s] == 0.0 {
                    continue;
                }
                if let Some(q) = self.neighbor(i, j, k, s) {
                    acc += row[s] * get(q);
                }
            }
        }
        acc
    }

    #[inline(always)]
    fn row_dot(&self, x: &[f64], i: usize, j: usize, k: usize) -> f64 {
        let p = self.dims.idx(i, j, k);
        self.diagonal(p) * x[p] + self.off_diagonal_dot(x, i, j, k)
    }

    fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{what} has {len} values, operator {} needs {}",
                self.dims,
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// `y = K x`. Dirichlet rows are identity rows, so they return `x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_len("input", x.len())?;
        self.check_len("output", y.len())?;
        let d = self.dims;
        let plane = d.n1 * d.n2;
        y.par_chunks_mut(plane).enumerate().for_each(|(k, out)| {
            for j in 0..d.n2 {
                for i in 0..d.n1 {
                    out[i + d.n1 * j] = self.row_dot(x, i, j, k);
                }
            }
        });
        Ok(())
    }

    /// `r = f - K x` on free nodes, zero on Dirichlet nodes.
    pub fn residual(&self, x: &[f64], f: &[f64], r: &mut [f64]) -> Result<()> {
        self.check_len("solution", x.len())?;
        self.check_len("right-hand side", f.len())?;
        self.check_len("residual", r.len())?;
        let d = self.dims;
        let plane = d.n1 * d.n2;
        r.par_chunks_mut(plane).enumerate().for_each(|(k, out)| {
            for j in 0..d.n2 {
                for i in 0..d.n1 {
                    let p = d.idx(i, j, k);
                    out[i + d.n1 * j] = if self.mask[p] {
                        0.0
                    } else {
                        f[p] - self.row_dot(x, i, j, k)
                    };
                }
            }
        });
        Ok(())
    }

    /// `(||f - Kx||_2, relative)` over free nodes; the relative value falls
    /// back to the absolute one when `||f|| = 0`.
    pub fn residual_norm(&self, x: &[f64], f: &[f64]) -> Result<(f64, f64)> {
        let mut r = vec![0.0; self.dims.len()];
        self.residual(x, f, &mut r)?;
        let abs = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let fnorm = self.free_norm(f);
        Ok((abs, if fnorm > 0.0 { abs / fnorm } else { abs }))
    }

    /// Euclidean norm of `v` restricted to free nodes.
    pub fn free_norm(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(&self.mask)
            .filter(|(_, m)| !**m)
            .map(|(x, _)| x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest `|K_pq - K_qp|` over all stored couplings.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dims;
        let mut worst: f64 = 0.0;
        for p in 0..d.len() {
            let (i, j, k) = d.coords(p);
            for s in 0..27 {
                if let Some(q) = self.neighbor(i, j, k, s) {
                    worst = worst.max((self.coefficient(p, s) - self.coefficient(q, 26 - s)).abs());
                }
            }
        }
        worst
    }

    /// Identity rows and zero couplings on masked nodes.
    pub(crate) fn eliminate_masked(&mut self) {
        let d = self.dims;
        for p in 0..d.len() {
            let (i, j, k) = d.coords(p);
            if self.mask[p] {
                let row = &mut self.coeff[27 * p..27 * p + 27];
                row.fill(0.0);
                row[CENTER] = 1.0;
                continue;
            }
            for s in 0..27 {
                if s == CENTER {
                    continue;
                }
                match self.neighbor(i, j, k, s) {
                    Some(q) if !self.mask[q] => {}
                    _ => self.coeff[27 * p + s] = 0.0,
                }
            }
        }
    }
}
