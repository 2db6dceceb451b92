//! Isoparametric trilinear hexahedron.
//!
//! Reference cell is `[-1, 1]^3`; local vertex `a` sits at reference
//! coordinates `2 * vertex_offset(a) - 1`.

use crate::error::Error;
use crate::grid::vertex_offset;

use super::PenaltyTensor;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

const G: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)

/// Tensor-product 2-point Gauss rule, ordered like the local vertices.
pub const GAUSS_POINTS: [Vec3; 8] = [
    [-G, -G, -G],
    [G, -G, -G],
    [-G, G, -G],
    [G, G, -G],
    [-G, -G, G],
    [G, -G, G],
    [-G, G, G],
    [G, G, G],
];

/// Reference volume of `[-1, 1]^3`, the weight of the one-point rule.
pub const CENTER_WEIGHT: f64 = 8.0;

#[inline(always)]
fn vertex_sign(a: usize) -> Vec3 {
    let (i, j, k) = vertex_offset(a);
    [2.0 * i as f64 - 1.0, 2.0 * j as f64 - 1.0, 2.0 * k as f64 - 1.0]
}

/// Reference-space gradients of the 8 trilinear basis functions.
pub fn shape_gradients(xi: Vec3) -> [Vec3; 8] {
    let mut out = [[0.0; 3]; 8];
    for (a, g) in out.iter_mut().enumerate() {
        let s = vertex_sign(a);
        let f = [
            0.5 * (1.0 + s[0] * xi[0]),
            0.5 * (1.0 + s[1] * xi[1]),
            0.5 * (1.0 + s[2] * xi[2]),
        ];
        *g = [
            0.5 * s[0] * f[1] * f[2],
            0.5 * s[1] * f[0] * f[2],
            0.5 * s[2] * f[0] * f[1],
        ];
    }
    out
}

/// Geometry of the isoparametric map at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct Jacobian {
    /// `j[d][e] = d x_d / d xi_e`.
    pub j: Mat3,
    pub det: f64,
}

impl Jacobian {
    /// `J^{-T}`, so that physical gradients are `J^{-T} * reference gradient`.
    pub fn inverse_transpose(&self) -> Mat3 {
        let m = &self.j;
        let inv_det = 1.0 / self.det;
        // cofactor matrix divided by det is J^{-T}
        [
            [
                (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_det,
                (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_det,
                (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_det,
            ],
            [
                (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_det,
                (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_det,
                (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_det,
            ],
            [
                (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_det,
                (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_det,
                (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_det,
            ],
        ]
    }
}

#[inline]
fn jacobian_from(coords: &[Vec3; 8], grads: &[Vec3; 8]) -> Jacobian {
    let mut j = [[0.0; 3]; 3];
    for (x, g) in coords.iter().zip(grads) {
        for d in 0..3 {
            for e in 0..3 {
                j[d][e] += x[d] * g[e];
            }
        }
    }
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
        - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    Jacobian { j, det }
}

pub fn jacobian(coords: &[Vec3; 8], xi: Vec3) -> Jacobian {
    jacobian_from(coords, &shape_gradients(xi))
}

#[inline(always)]
fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// Physical gradients of the basis functions at `xi`, with `det J`. A
/// non-positive determinant is returned as the error.
pub fn physical_gradients(coords: &[Vec3; 8], xi: Vec3) -> std::result::Result<([Vec3; 8], f64), f64> {
    let grads = shape_gradients(xi);
    let jac = jacobian_from(coords, &grads);
    if !(jac.det > 0.0) {
        return Err(jac.det);
    }
    let jit = jac.inverse_transpose();
    let mut out = [[0.0; 3]; 8];
    for (o, g) in out.iter_mut().zip(&grads) {
        *o = mat_vec(&jit, g);
    }
    Ok((out, jac.det))
}

/// `K_ab = sum_g |det J| (J^{-T} dN_a) . A^{-1} (J^{-T} dN_b)` over the
/// 2x2x2 Gauss rule (unit weights).
///
/// Only the upper triangle is computed; the lower one is a bitwise mirror.
/// On failure the error carries the offending Gauss point index and its
/// determinant.
pub fn element_stiffness(
    coords: &[Vec3; 8],
    penalty: &PenaltyTensor,
) -> std::result::Result<[[f64; 8]; 8], (usize, f64)> {
    let inv = penalty.inverse_diagonal();
    let mut ke = [[0.0; 8]; 8];
    for (gp, xi) in GAUSS_POINTS.iter().enumerate() {
        let grads = shape_gradients(*xi);
        let jac = jacobian_from(coords, &grads);
        if !(jac.det > 0.0) {
            return Err((gp, jac.det));
        }
        let jit = jac.inverse_transpose();
        let mut phys = [[0.0; 3]; 8];
        for (p, g) in phys.iter_mut().zip(&grads) {
            *p = mat_vec(&jit, g);
        }
        let w = jac.det;
        for a in 0..8 {
            let ga = [
                phys[a][0] * inv[0] * w,
                phys[a][1] * inv[1] * w,
                phys[a][2] * inv[2] * w,
            ];
            for b in a..8 {
                ke[a][b] += ga[0] * phys[b][0] + ga[1] * phys[b][1] + ga[2] * phys[b][2];
            }
        }
    }
    for a in 0..8 {
        for b in 0..a {
            ke[a][b] = ke[b][a];
        }
    }
    Ok(ke)
}

/// `f_a = -8 |det J(0)| (J^{-T}(0) dN_a(0)) . u0`.
pub fn element_rhs(coords: &[Vec3; 8], u0: Vec3) -> std::result::Result<[f64; 8], f64> {
    let (phys, det) = physical_gradients(coords, [0.0; 3])?;
    let mut f = [0.0; 8];
    let w = CENTER_WEIGHT * det;
    for (fa, g) in f.iter_mut().zip(&phys) {
        *fa = -w * (g[0] * u0[0] + g[1] * u0[1] + g[2] * u0[2]);
    }
    Ok(f)
}

/// Physical gradient at the cell center of the trilinear function with
/// vertex values `values`.
pub fn center_gradient(coords: &[Vec3; 8], values: &[f64; 8]) -> std::result::Result<Vec3, f64> {
    let (phys, _) = physical_gradients(coords, [0.0; 3])?;
    let mut g = [0.0; 3];
    for (v, p) in values.iter().zip(&phys) {
        for d in 0..3 {
            g[d] += v * p[d];
        }
    }
    Ok(g)
}

pub(crate) fn singular(cell: (usize, usize, usize), point: usize, det: f64) -> Error {
    Error::SingularElement {
        i: cell.0,
        j: cell.1,
        k: cell.2,
        point,
        det,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> [Vec3; 8] {
        let mut c = [[0.0; 3]; 8];
        for (a, v) in c.iter_mut().enumerate() {
            let (i, j, k) = vertex_offset(a);
            *v = [i as f64, j as f64, k as f64];
        }
        c
    }

    #[test]
    fn center_gradient_of_first_vertex() {
        let g = shape_gradients([0.0; 3]);
        assert_eq!(g[0], [-0.125, -0.125, -0.125]);
        assert_eq!(g[7], [0.125, 0.125, 0.125]);
    }

    #[test]
    fn corner_gradient_of_own_vertex() {
        let g = shape_gradients([1.0, 1.0, 1.0]);
        assert_eq!(g[7], [0.5, 0.5, 0.5]);
    }

    #[test]
    fn gradients_sum_to_zero() {
        for xi in [[0.3, -0.7, 0.1], [1.0, -1.0, 0.5], [0.0; 3]] {
            let g = shape_gradients(xi);
            for d in 0..3 {
                let s: f64 = g.iter().map(|v| v[d]).sum();
                assert!(s.abs() < 1e-16);
            }
        }
    }

    #[test]
    fn unit_cube_jacobian() {
        let jac = jacobian(&unit_cube(), [0.2, 0.1, -0.4]);
        assert!((jac.det - 0.125).abs() < 1e-15);
        let jit = jac.inverse_transpose();
        for d in 0..3 {
            for e in 0..3 {
                let want = if d == e { 2.0 } else { 0.0 };
                assert!((jit[d][e] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        let mut c = unit_cube();
        c[3][2] += 0.4;
        c[6][0] -= 0.2;
        c[5][1] += 0.3;
        let ke = element_stiffness(&c, &PenaltyTensor::new(1.0, 2.0, 0.5).unwrap()).unwrap();
        for row in &ke {
            let s: f64 = row.iter().sum();
            assert!(s.abs() < 1e-14, "{s}");
        }
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(ke[a][b].to_bits(), ke[b][a].to_bits());
            }
        }
    }

    #[test]
    fn rhs_on_unit_cube() {
        let f = element_rhs(&unit_cube(), [1.0, 0.0, 0.0]).unwrap();
        for (a, fa) in f.iter().enumerate() {
            let want = if vertex_offset(a).0 == 0 { 0.25 } else { -0.25 };
            assert!((fa - want).abs() < 1e-15);
        }
        assert_eq!(element_rhs(&unit_cube(), [0.0; 3]).unwrap(), [0.0; 8]);
    }

    #[test]
    fn inverted_cell_is_rejected() {
        let mut c = unit_cube();
        for v in c.iter_mut() {
            v[2] = -v[2];
        }
        let (point, det) = element_stiffness(&c, &PenaltyTensor::identity()).unwrap_err();
        assert_eq!(point, 0);
        assert!(det < 0.0);
        assert!(element_rhs(&c, [1.0, 0.0, 0.0]).is_err());
    }
}
