//! Independent dense oracles shared by the integration tests.
#![allow(dead_code)]

use femwind::grid::Dims;
use femwind::mesh::{build_mesh, generate_levels, synthetic_terrain, StructuredMesh, TerrainKind};
use femwind::mgsolver::CoarseningPlan;
use femwind::{PenaltyTensor, WindField};
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

pub fn box_mesh(n1: usize, n2: usize, n3: usize, h: f64) -> StructuredMesh {
    let t = synthetic_terrain(TerrainKind::Flat, n1 + 1, n2 + 1, h, h).unwrap();
    build_mesh(&t, &generate_levels(n3, n3 as f64 * h, 1.0).unwrap()).unwrap()
}

#[allow(clippy::too_many_arguments)]
pub fn hill_mesh(n1: usize, n2: usize, n3: usize, d: f64, amplitude: f64, sigma: f64, top: f64, ratio: f64) -> StructuredMesh {
    let kind = TerrainKind::GaussianHill {
        amplitude,
        sigma,
        center: None,
    };
    let t = synthetic_terrain(kind, n1 + 1, n2 + 1, d, d).unwrap();
    build_mesh(&t, &generate_levels(n3, top, ratio).unwrap()).unwrap()
}

fn sign(a: usize, d: usize) -> f64 {
    if (a >> d) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `dN_a / dxi` for `N_a = prod_d (1 + s_d xi_d) / 8`.
pub fn ref_grad(a: usize, xi: [f64; 3]) -> Vector3<f64> {
    let f: Vec<f64> = (0..3).map(|d| 1.0 + sign(a, d) * xi[d]).collect();
    Vector3::new(
        sign(a, 0) * f[1] * f[2] / 8.0,
        sign(a, 1) * f[0] * f[2] / 8.0,
        sign(a, 2) * f[0] * f[1] / 8.0,
    )
}

/// Physical gradients and `det J` at `xi`.
pub fn phys_grads(coords: &[[f64; 3]; 8], xi: [f64; 3]) -> (Vec<Vector3<f64>>, f64) {
    let mut j = Matrix3::zeros();
    for (a, x) in coords.iter().enumerate() {
        j += Vector3::new(x[0], x[1], x[2]) * ref_grad(a, xi).transpose();
    }
    let det = j.determinant();
    let jit = j.try_inverse().expect("regular element").transpose();
    ((0..8).map(|a| jit * ref_grad(a, xi)).collect(), det)
}

/// 2x2x2 Gauss element stiffness, written independently of the library.
pub fn oracle_element(coords: &[[f64; 3]; 8], penalty: &PenaltyTensor) -> DMatrix<f64> {
    let a = penalty.coefficients();
    let inv = Matrix3::from_diagonal(&Vector3::new(1.0 / (a[0] * a[0]), 1.0 / (a[1] * a[1]), 1.0 / (a[2] * a[2])));
    let g = 1.0 / 3f64.sqrt();
    let mut k = DMatrix::zeros(8, 8);
    for q in 0..8 {
        let xi = [sign(q, 0) * g, sign(q, 1) * g, sign(q, 2) * g];
        let (grads, det) = phys_grads(coords, xi);
        for r in 0..8 {
            for c in 0..8 {
                k[(r, c)] += det * (grads[r].transpose() * inv * grads[c])[0];
            }
        }
    }
    k
}

pub fn cell_nodes(d: Dims, i: usize, j: usize, k: usize) -> [usize; 8] {
    let mut out = [0; 8];
    for (a, o) in out.iter_mut().enumerate() {
        *o = d.idx(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
    }
    out
}

/// Dense global stiffness and load before boundary treatment.
pub fn dense_unconstrained(mesh: &StructuredMesh, penalty: &PenaltyTensor, u0: &WindField) -> (DMatrix<f64>, DVector<f64>) {
    let d = mesh.dims();
    let c = mesh.cell_dims();
    let mut k = DMatrix::zeros(d.len(), d.len());
    let mut f = DVector::zeros(d.len());
    for ck in 0..c.n3 {
        for cj in 0..c.n2 {
            for ci in 0..c.n1 {
                let coords = mesh.cell_coords(ci, cj, ck);
                let ke = oracle_element(&coords, penalty);
                let nodes = cell_nodes(d, ci, cj, ck);
                let (grads, det) = phys_grads(&coords, [0.0; 3]);
                let u = u0.get(ci, cj, ck);
                let u = Vector3::new(u[0], u[1], u[2]);
                for a in 0..8 {
                    f[nodes[a]] -= 8.0 * det * grads[a].dot(&u);
                    for b in 0..8 {
                        k[(nodes[a], nodes[b])] += ke[(a, b)];
                    }
                }
            }
        }
    }
    (k, f)
}

/// Symmetric elimination of the lateral and top faces.
pub fn eliminate(k: &mut DMatrix<f64>, f: &mut DVector<f64>, d: Dims) {
    for p in 0..d.len() {
        let (i, j, l) = d.coords(p);
        if i == 0 || j == 0 || i + 1 == d.n1 || j + 1 == d.n2 || l + 1 == d.n3 {
            k.row_mut(p).fill(0.0);
            k.column_mut(p).fill(0.0);
            k[(p, p)] = 1.0;
            f[p] = 0.0;
        }
    }
}

pub fn dense_system(mesh: &StructuredMesh, penalty: &PenaltyTensor, u0: &WindField) -> (DMatrix<f64>, DVector<f64>) {
    let (mut k, mut f) = dense_unconstrained(mesh, penalty, u0);
    eliminate(&mut k, &mut f, mesh.dims());
    (k, f)
}

/// Stencil operator expanded into a dense matrix.
pub fn to_dense(op: &femwind::StencilOperator) -> DMatrix<f64> {
    let d = op.dims();
    let mut m = DMatrix::zeros(d.len(), d.len());
    for p in 0..d.len() {
        let (i, j, k) = d.coords(p);
        for s in 0..27 {
            if let Some(q) = op.neighbor(i, j, k, s) {
                m[(p, q)] = op.coefficient(p, s);
            }
        }
    }
    m
}

/// 1D interpolation from kept fine indices.
pub fn interp_1d(kept: &[usize], n_fine: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n_fine, kept.len());
    for (c, w) in kept.windows(2).enumerate() {
        p[(w[0], c)] = 1.0;
        for m in w[0] + 1..w[1] {
            let t = (m - w[0]) as f64 / (w[1] - w[0]) as f64;
            p[(m, c)] = 1.0 - t;
            p[(m, c + 1)] = t;
        }
    }
    p[(kept[kept.len() - 1], kept.len() - 1)] = 1.0;
    p
}

/// Dense trilinear prolongation for `plan` on fine node dims `fine`.
pub fn dense_prolongation(plan: &CoarseningPlan, fine: Dims) -> DMatrix<f64> {
    let horiz = |n: usize| -> Vec<usize> {
        if plan.horizontal {
            (0..n).step_by(2).collect()
        } else {
            (0..n).collect()
        }
    };
    let px = interp_1d(&horiz(fine.n1), fine.n1);
    let py = interp_1d(&horiz(fine.n2), fine.n2);
    let pz = interp_1d(&plan.kept_layers, fine.n3);
    pz.kronecker(&py.kronecker(&px))
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
