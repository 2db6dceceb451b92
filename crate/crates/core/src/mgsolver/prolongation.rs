use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Dims;

use super::CoarseningPlan;

/// Interpolation of one fine index from at most two coarse indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Interp {
    pub idx: [usize; 2],
    pub w: [f64; 2],
    pub len: usize,
}

impl Interp {
    fn coincident(c: usize) -> Self {
        Self {
            idx: [c, c],
            w: [1.0, 0.0],
            len: 1,
        }
    }

    fn midpoint(lo: usize) -> Self {
        Self {
            idx: [lo, lo + 1],
            w: [0.5, 0.5],
            len: 2,
        }
    }

    #[inline(always)]
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).map(move |t| (self.idx[t], self.w[t]))
    }
}

fn halving(n: usize) -> Vec<Interp> {
    (0..n)
        .map(|i| if i % 2 == 0 { Interp::coincident(i / 2) } else { Interp::midpoint(i / 2) })
        .collect()
}

fn identity(n: usize) -> Vec<Interp> {
    (0..n).map(Interp::coincident).collect()
}

fn vertical(kept: &[usize]) -> Vec<Interp> {
    let mut out = Vec::new();
    for (c, w) in kept.windows(2).enumerate() {
        out.push(Interp::coincident(c));
        if w[1] - w[0] == 2 {
            out.push(Interp::midpoint(c));
        }
    }
    out.push(Interp::coincident(kept.len() - 1));
    out
}

fn transpose(map: &[Interp], coarse_len: usize) -> Vec<Vec<(usize, f64)>> {
    let mut out = vec![Vec::new(); coarse_len];
    for (f, interp) in map.iter().enumerate() {
        for (c, w) in interp.terms() {
            out[c].push((f, w));
        }
    }
    out
}

/// Tensor-product trilinear interpolation in index space from a coarse
/// lattice to a fine one.
#[derive(Debug, Clone)]
pub struct Prolongation {
    plan: CoarseningPlan,
    fine: Dims,
    coarse: Dims,
    maps: [Vec<Interp>; 3],
    adjoint: [Vec<Vec<(usize, f64)>>; 3],
}

/// Build the interpolation implied by `plan` for a fine lattice of `fine` nodes.
pub fn build_prolongation(plan: &CoarseningPlan, fine: Dims) -> Result<Prolongation> {
    if !plan.is_legal(fine.n3 - 1) {
        return Err(Error::DimensionMismatch(format!(
            "plan layers {:?} do not fit {} node layers",
            plan.kept_layers, fine.n3
        )));
    }
    let (m1, m2) = if plan.horizontal {
        if fine.n1.is_multiple_of(2) || fine.n2.is_multiple_of(2) || fine.n1 < 3 || fine.n2 < 3 {
            return Err(Error::DimensionMismatch(format!(
                "horizontal coarsening needs odd node counts >= 3, got {fine}"
            )));
        }
        (halving(fine.n1), halving(fine.n2))
    } else {
        (identity(fine.n1), identity(fine.n2))
    };
    let m3 = vertical(&plan.kept_layers);
    let coarse = Dims::new(
        if plan.horizontal { fine.n1 / 2 + 1 } else { fine.n1 },
        if plan.horizontal { fine.n2 / 2 + 1 } else { fine.n2 },
        plan.kept_layers.len(),
    );
    let adjoint = [
        transpose(&m1, coarse.n1),
        transpose(&m2, coarse.n2),
        transpose(&m3, coarse.n3),
    ];
    Ok(Prolongation {
        plan: plan.clone(),
        fine,
        coarse,
        maps: [m1, m2, m3],
        adjoint,
    })
}

impl Prolongation {
    pub fn plan(&self) -> &CoarseningPlan {
        &self.plan
    }

    pub fn fine_dims(&self) -> Dims {
        self.fine
    }

    pub fn coarse_dims(&self) -> Dims {
        self.coarse
    }

    /// Coarse parents of fine node `(i, j, k)` with their weights.
    pub fn parents(&self, i: usize, j: usize, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let c = self.coarse;
        let (a, b, d) = (&self.maps[0][i], &self.maps[1][j], &self.maps[2][k]);
        d.terms().flat_map(move |(ck, wk)| {
            b.terms().flat_map(move |(cj, wj)| {
                a.terms().map(move |(ci, wi)| (c.idx(ci, cj, ck), wi * wj * wk))
            })
        })
    }

    /// Parents as coarse index triples.
    pub(crate) fn parent_triples(
        &self,
        i: usize,
        j: usize,
        k: usize,
    ) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        let (a, b, d) = (&self.maps[0][i], &self.maps[1][j], &self.maps[2][k]);
        d.terms().flat_map(move |(ck, wk)| {
            b.terms()
                .flat_map(move |(cj, wj)| a.terms().map(move |(ci, wi)| ((ci, cj, ck), wi * wj * wk)))
        })
    }

    fn check(&self, fine: usize, coarse: usize) -> Result<()> {
        if fine != self.fine.len() || coarse != self.coarse.len() {
            return Err(Error::DimensionMismatch(format!(
                "transfer between {} and {} got {fine} fine and {coarse} coarse values",
                self.fine, self.coarse
            )));
        }
        Ok(())
    }

    /// `fine += P coarse`.
    pub fn prolong_add(&self, coarse: &[f64], fine: &mut [f64]) -> Result<()> {
        self.check(fine.len(), coarse.len())?;
        let f = self.fine;
        fine.par_chunks_mut(f.n1 * f.n2).enumerate().for_each(|(k, plane)| {
            for j in 0..f.n2 {
                for i in 0..f.n1 {
                    let mut acc = 0.0;
                    for (p, w) in self.parents(i, j, k) {
                        acc += w * coarse[p];
                    }
                    plane[i + f.n1 * j] += acc;
                }
            }
        });
        Ok(())
    }

    /// `P coarse` as a new fine vector.
    pub fn prolong(&self, coarse: &[f64]) -> Result<Vec<f64>> {
        let mut fine = vec![0.0; self.fine.len()];
        self.prolong_add(coarse, &mut fine)?;
        Ok(fine)
    }

    /// `coarse = Pᵀ fine`, using the same weights as [`Self::prolong_add`].
    pub fn restrict_into(&self, fine: &[f64], coarse: &mut [f64]) -> Result<()> {
        self.check(fine.len(), coarse.len())?;
        let (f, c) = (self.fine, self.coarse);
        coarse.par_chunks_mut(c.n1 * c.n2).enumerate().for_each(|(ck, plane)| {
            for cj in 0..c.n2 {
                for ci in 0..c.n1 {
                    let mut acc = 0.0;
                    for &(k, wk) in &self.adjoint[2][ck] {
                        for &(j, wj) in &self.adjoint[1][cj] {
                            for &(i, wi) in &self.adjoint[0][ci] {
                                acc += wi * wj * wk * fine[f.idx(i, j, k)];
                            }
                        }
                    }
                    plane[ci + c.n1 * cj] = acc;
                }
            }
        });
        Ok(())
    }

    pub fn restrict(&self, fine: &[f64]) -> Result<Vec<f64>> {
        let mut coarse = vec![0.0; self.coarse.len()];
        self.restrict_into(fine, &mut coarse)?;
        Ok(coarse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(layers: usize) -> CoarseningPlan {
        CoarseningPlan {
            horizontal: true,
            kept_layers: (0..=layers).step_by(2).collect(),
        }
    }

    #[test]
    fn cell_center_gets_eighths() {
        let p = build_prolongation(&full(2), Dims::new(3, 3, 3)).unwrap();
        assert_eq!(p.coarse_dims(), Dims::new(2, 2, 2));
        let w: Vec<_> = p.parents(1, 1, 1).collect();
        assert_eq!(w.len(), 8);
        assert!(w.iter().all(|(_, w)| *w == 0.125));
    }

    #[test]
    fn vertical_only_halves() {
        let plan = CoarseningPlan {
            horizontal: false,
            kept_layers: vec![0, 2, 3],
        };
        let p = build_prolongation(&plan, Dims::new(4, 4, 4)).unwrap();
        assert_eq!(p.coarse_dims(), Dims::new(4, 4, 3));
        let c = p.coarse_dims();
        let w: Vec<_> = p.parents(2, 1, 1).collect();
        assert_eq!(w, vec![(c.idx(2, 1, 0), 0.5), (c.idx(2, 1, 1), 0.5)]);
        let w: Vec<_> = p.parents(2, 1, 3).collect();
        assert_eq!(w, vec![(c.idx(2, 1, 2), 1.0)]);
    }

    #[test]
    fn partition_of_unity() {
        let plan = CoarseningPlan {
            horizontal: true,
            kept_layers: vec![0, 2, 3, 5],
        };
        let d = Dims::new(7, 5, 6);
        let p = build_prolongation(&plan, d).unwrap();
        let one = p.prolong(&vec![1.0; p.coarse_dims().len()]).unwrap();
        assert!(one.iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_even_counts_and_bad_plans() {
        assert!(build_prolongation(&full(2), Dims::new(4, 3, 3)).is_err());
        let bad = CoarseningPlan {
            horizontal: false,
            kept_layers: vec![0, 3],
        };
        assert!(build_prolongation(&bad, Dims::new(3, 3, 4)).is_err());
    }

    #[test]
    fn zero_restricts_to_zero() {
        let p = build_prolongation(&full(4), Dims::new(5, 5, 5)).unwrap();
        assert!(p.restrict(&vec![0.0; 125]).unwrap().iter().all(|v| *v == 0.0));
    }
}
