use crate::assembly::StencilOperator;
use crate::error::{Error, Result};
use crate::grid::{stencil_slot, CENTER};

use super::Prolongation;

/// Variational coarse operator `Pᵀ K P` restricted to free nodes.
///
/// A coarse node is Dirichlet iff its coincident fine node is. Parents that
/// are Dirichlet carry no unknown and are skipped, and their rows become
/// identity rows. The upper half of each row is mirrored into the lower half
/// so the result is exactly symmetric.
pub fn galerkin_coarsen(op: &StencilOperator, p: &Prolongation) -> Result<StencilOperator> {
    let fine = p.fine_dims();
    let coarse = p.coarse_dims();
    if op.dims() != fine {
        return Err(Error::DimensionMismatch(format!(
            "operator {} vs prolongation fine grid {fine}",
            op.dims()
        )));
    }

    let mut mask = vec![false; coarse.len()];
    for k in 0..fine.n3 {
        for j in 0..fine.n2 {
            for i in 0..fine.n1 {
                let mut parents = p.parent_triples(i, j, k);
                if let Some(((ci, cj, ck), w)) = parents.next() {
                    if w == 1.0 && parents.next().is_none() {
                        mask[coarse.idx(ci, cj, ck)] = op.is_dirichlet(fine.idx(i, j, k));
                    }
                }
            }
        }
    }

    let mut coeff = vec![0.0; 27 * coarse.len()];
    let mut row_parents: Vec<((usize, usize, usize), f64)> = Vec::with_capacity(8);
    let mut col_parents: Vec<((usize, usize, usize), f64)> = Vec::with_capacity(8);
    for pf in 0..fine.len() {
        if op.is_dirichlet(pf) {
            continue;
        }
        let (i, j, k) = fine.coords(pf);
        row_parents.clear();
        row_parents.extend(
            p.parent_triples(i, j, k)
                .filter(|(c, _)| !mask[coarse.idx(c.0, c.1, c.2)]),
        );
        if row_parents.is_empty() {
            continue;
        }
        for s in 0..27 {
            let kpq = op.coefficient(pf, s);
            if kpq == 0.0 {
                continue;
            }
            let Some(qf) = op.neighbor(i, j, k, s) else {
                continue;
            };
            if op.is_dirichlet(qf) {
                continue;
            }
            let (qi, qj, qk) = fine.coords(qf);
            col_parents.clear();
            col_parents.extend(
                p.parent_triples(qi, qj, qk)
                    .filter(|(c, _)| !mask[coarse.idx(c.0, c.1, c.2)]),
            );
            for &(rc, wr) in &row_parents {
                let row = coarse.idx(rc.0, rc.1, rc.2);
                for &(cc, wc) in &col_parents {
                    let di = cc.0 as isize - rc.0 as isize;
                    let dj = cc.1 as isize - rc.1 as isize;
                    let dk = cc.2 as isize - rc.2 as isize;
                    if di.abs() > 1 || dj.abs() > 1 || dk.abs() > 1 {
                        return Err(Error::Internal(format!(
                            "coarse coupling ({di}, {dj}, {dk}) exceeds the 27-point stencil"
                        )));
                    }
                    coeff[27 * row + stencil_slot(di, dj, dk)] += kpq * (wr * wc);
                }
            }
        }
    }

    let mut out = StencilOperator::new(coarse, coeff, mask);
    let data = out.coefficients_mut();
    for pc in 0..coarse.len() {
        let (i, j, k) = coarse.coords(pc);
        for s in CENTER + 1..27 {
            let (di, dj, dk) = crate::grid::slot_offset(s);
            let (ni, nj, nk) = (i as isize + di, j as isize + dj, k as isize + dk);
            if ni < 0
                || nj < 0
                || nk < 0
                || ni as usize >= coarse.n1
                || nj as usize >= coarse.n2
                || nk as usize >= coarse.n3
            {
                continue;
            }
            let q = coarse.idx(ni as usize, nj as usize, nk as usize);
            data[27 * q + 26 - s] = data[27 * pc + s];
        }
    }
    out.eliminate_masked();
    Ok(out)
}
