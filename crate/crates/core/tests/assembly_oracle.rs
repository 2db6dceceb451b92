mod common;

use common::*;
use femwind::assembly::{apply_operator, assemble, assemble_unconstrained, recover_wind, weak_divergence};
use femwind::{MultiplierField, PenaltyTensor, WindField};
use nalgebra::{DMatrix, DVector, Vector3};

fn log_wind(mesh: &femwind::StructuredMesh) -> WindField {
    femwind::pipeline::initialize_wind(
        mesh,
        &femwind::WindSpec::LogProfile {
            speed: 5.0,
            direction: 0.0,
            roughness_length: 0.1,
            reference_height: 10.0,
        },
    )
    .unwrap()
}

#[test]
fn stencil_matches_dense_assembly_on_hill() {
    let mesh = hill_mesh(7, 6, 5, 30.0, 60.0, 70.0, 250.0, 1.3);
    let pen = PenaltyTensor::new(1.0, 1.0, 2.5).unwrap();
    let u0 = log_wind(&mesh);
    let (kd, fd) = dense_system(&mesh, &pen, &u0);
    let (op, rhs) = assemble(&mesh, &pen, &u0).unwrap();
    let ks = to_dense(&op);
    let scale = kd.amax();
    assert!((&ks - &kd).amax() < 1e-13 * scale);
    let fscale = fd.amax();
    for (a, b) in rhs.values().iter().zip(fd.iter()) {
        assert!((a - b).abs() < 1e-13 * fscale);
    }

    let x = random_vec(op.dims().len(), 2);
    let y = apply_operator(&op, &MultiplierField::from_values(op.dims(), x.clone()).unwrap()).unwrap();
    let yd = &kd * DVector::from_vec(x);
    assert!(rel_err(&y, yd.as_slice()) < 1e-13);
}

#[test]
fn unconstrained_matches_dense_and_is_singular_by_constants() {
    let mesh = hill_mesh(4, 4, 3, 20.0, 30.0, 30.0, 100.0, 1.2);
    let pen = PenaltyTensor::identity();
    let u0 = WindField::uniform(mesh.cell_dims(), [1.0, 2.0, 0.0]).unwrap();
    let (kd, _) = dense_unconstrained(&mesh, &pen, &u0);
    let (op, _) = assemble_unconstrained(&mesh, &pen, &u0).unwrap();
    assert!((to_dense(&op) - &kd).amax() < 1e-13 * kd.amax());
    let ones = DVector::from_element(kd.nrows(), 1.0);
    assert!((&kd * ones).amax() < 1e-12 * kd.amax());
}

#[test]
fn dense_direct_solve_has_small_residual() {
    let mesh = hill_mesh(6, 6, 4, 25.0, 40.0, 50.0, 200.0, 1.3);
    let pen = PenaltyTensor::new(1.0, 1.0, 4.0).unwrap();
    let u0 = log_wind(&mesh);
    let (kd, fd) = dense_system(&mesh, &pen, &u0);
    let x = kd.clone().cholesky().unwrap().solve(&fd);
    let (op, rhs) = assemble(&mesh, &pen, &u0).unwrap();
    let (_, rel) = op.residual_norm(x.as_slice(), rhs.values()).unwrap();
    assert!(rel < 1e-12, "{rel}");
}

/// One-point stiffness `B`, the operator the cell-center divergence sees.
fn one_point_stiffness(mesh: &femwind::StructuredMesh, pen: &PenaltyTensor) -> DMatrix<f64> {
    let d = mesh.dims();
    let c = mesh.cell_dims();
    let inv = pen.inverse_diagonal();
    let mut b = DMatrix::zeros(d.len(), d.len());
    for k in 0..c.n3 {
        for j in 0..c.n2 {
            for i in 0..c.n1 {
                let coords = mesh.cell_coords(i, j, k);
                let (g, det) = phys_grads(&coords, [0.0; 3]);
                let nodes = cell_nodes(d, i, j, k);
                for a in 0..8 {
                    for e in 0..8 {
                        let ag = Vector3::new(inv[0] * g[e][0], inv[1] * g[e][1], inv[2] * g[e][2]);
                        b[(nodes[a], nodes[e])] += 8.0 * det * g[a].dot(&ag);
                    }
                }
            }
        }
    }
    b
}

#[test]
fn divergence_of_recovered_wind_decomposes() {
    // d(u) = (K lambda - f) + (B - K) lambda on free nodes, for any lambda.
    let mesh = hill_mesh(5, 5, 4, 20.0, 25.0, 40.0, 120.0, 1.3);
    let pen = PenaltyTensor::new(1.0, 1.0, 2.0).unwrap();
    let u0 = log_wind(&mesh);
    let (op, rhs) = assemble(&mesh, &pen, &u0).unwrap();
    let d = op.dims();
    let lam: Vec<f64> = random_vec(d.len(), 9)
        .into_iter()
        .zip(op.dirichlet_mask())
        .map(|(v, m)| if *m { 0.0 } else { v })
        .collect();
    let lambda = MultiplierField::from_values(d, lam.clone()).unwrap();
    let u = recover_wind(&mesh, &lambda, &u0, &pen).unwrap();
    let div = weak_divergence(&mesh, &u).unwrap();
    let (ku, _) = dense_unconstrained(&mesh, &pen, &u0);
    let b = one_point_stiffness(&mesh, &pen);
    let l = DVector::from_vec(lam);
    let kl = apply_operator(&op, &lambda).unwrap();
    let mismatch = (&b - &ku) * &l;
    for p in 0..d.len() {
        if op.is_dirichlet(p) {
            continue;
        }
        let want = (kl[p] - rhs.values()[p]) + mismatch[p];
        assert!((div[p] - want).abs() < 1e-10 * (1.0 + want.abs()), "node {p}: {} vs {want}", div[p]);
    }
}

#[test]
fn linear_multiplier_shifts_wind() {
    let mesh = box_mesh(4, 3, 3, 2.0);
    let pen = PenaltyTensor::new(1.0, 2.0, 4.0).unwrap();
    let d = mesh.dims();
    let vals: Vec<f64> = (0..d.len())
        .map(|p| {
            let (i, j, k) = d.coords(p);
            let x = mesh.node(i, j, k);
            x[0] + x[1] + x[2]
        })
        .collect();
    let lambda = MultiplierField::from_values(d, vals).unwrap();
    let u0 = WindField::uniform(mesh.cell_dims(), [1.0, 1.0, 1.0]).unwrap();
    let u = recover_wind(&mesh, &lambda, &u0, &pen).unwrap();
    for v in u.values() {
        assert!((v[0] - 2.0).abs() < 1e-13);
        assert!((v[1] - 1.25).abs() < 1e-13);
        assert!((v[2] - 1.0625).abs() < 1e-13);
    }
}

#[test]
fn hill_lifts_wind_on_windward_slope() {
    let mesh = hill_mesh(16, 16, 8, 30.0, 80.0, 80.0, 400.0, 1.3);
    let u0 = WindField::uniform(mesh.cell_dims(), [5.0, 0.0, 0.0]).unwrap();
    let res = femwind::pipeline::downscale_on_mesh(
        mesh,
        u0,
        &PenaltyTensor::identity(),
        &femwind::CycleParams::default(),
        None,
    )
    .unwrap();
    let w = &res.wind;
    // Hill centered at cell column 8; wind toward +x.
    let up = w.get(5, 8, 0)[2];
    let down = w.get(10, 8, 0)[2];
    assert!(up > 0.0 && down < 0.0, "windward {up}, lee {down}");
    // Flow is symmetric in y about the ridge line.
    let a = w.get(6, 5, 1);
    let b = w.get(6, 10, 1);
    assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] + b[1]).abs() < 1e-6);
    assert!(res.diagnostics.divergence.l2 < res.diagnostics.initial_divergence.l2);
}
