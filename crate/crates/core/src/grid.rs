//! Index conventions for logically Cartesian node and cell arrays.
//!
//! Every node array in the crate is stored with `i` fastest, then `j`, then
//! `k`. Cell arrays use the same ordering over cell indices.

/// Node counts of a structured grid: `n1 × n2` horizontally, `n3` node layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Dims {
    pub const fn new(n1: usize, n2: usize, n3: usize) -> Self {
        Self { n1, n2, n3 }
    }

    pub const fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline(always)]
    pub const fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n1 * (j + self.n2 * k)
    }

    #[inline]
    pub const fn coords(&self, p: usize) -> (usize, usize, usize) {
        let i = p % self.n1;
        let jk = p / self.n1;
        (i, jk % self.n2, jk / self.n2)
    }

    /// Cell counts of the grid whose nodes these are.
    pub const fn cells(&self) -> Dims {
        Dims::new(
            self.n1.saturating_sub(1),
            self.n2.saturating_sub(1),
            self.n3.saturating_sub(1),
        )
    }

    /// Lateral faces and the top layer carry the homogeneous Dirichlet
    /// condition; the bottom layer is free.
    #[inline]
    pub const fn is_dirichlet(&self, i: usize, j: usize, k: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n1 || j + 1 == self.n2 || k + 1 == self.n3
    }

    pub fn dirichlet_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for k in 0..self.n3 {
            for j in 0..self.n2 {
                for i in 0..self.n1 {
                    mask[self.idx(i, j, k)] = self.is_dirichlet(i, j, k);
                }
            }
        }
        mask
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

/// Position of neighbor `(di, dj, dk)`, each in `{-1, 0, 1}`, within a
/// 27-entry stencil row.
#[inline(always)]
pub const fn stencil_slot(di: isize, dj: isize, dk: isize) -> usize {
    ((di + 1) + 3 * (dj + 1) + 9 * (dk + 1)) as usize
}

/// Inverse of [`stencil_slot`].
#[inline(always)]
pub const fn slot_offset(slot: usize) -> (isize, isize, isize) {
    let s = slot as isize;
    (s % 3 - 1, (s / 3) % 3 - 1, s / 9 - 1)
}

pub const CENTER: usize = 13;

/// Local vertex `a` of a hexahedral cell sits at offset
/// `(a & 1, (a >> 1) & 1, (a >> 2) & 1)` from the cell's lowest node.
#[inline(always)]
pub const fn vertex_offset(a: usize) -> (usize, usize, usize) {
    (a & 1, (a >> 1) & 1, (a >> 2) & 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let d = Dims::new(4, 3, 5);
        for p in 0..d.len() {
            let (i, j, k) = d.coords(p);
            assert_eq!(d.idx(i, j, k), p);
        }
    }

    #[test]
    fn slots_are_reversible() {
        for s in 0..27 {
            let (di, dj, dk) = slot_offset(s);
            assert_eq!(stencil_slot(di, dj, dk), s);
            assert_eq!(stencil_slot(-di, -dj, -dk), 26 - s);
        }
        assert_eq!(stencil_slot(0, 0, 0), CENTER);
    }

    #[test]
    fn bottom_layer_is_free() {
        let d = Dims::new(4, 4, 3);
        assert!(!d.is_dirichlet(1, 1, 0));
        assert!(d.is_dirichlet(0, 1, 0));
        assert!(d.is_dirichlet(1, 1, 2));
        assert!(!d.is_dirichlet(2, 2, 1));
    }
}
