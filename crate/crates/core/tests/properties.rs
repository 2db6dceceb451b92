mod common;

use common::*;
use femwind::assembly::{assemble, assemble_unconstrained};
use femwind::grid::Dims;
use femwind::mesh::{build_mesh, generate_levels, StructuredMesh, TerrainSurface};
use femwind::mgsolver::{build_prolongation, galerkin_coarsen, CoarseningPlan};
use femwind::{PenaltyTensor, WindField};
use proptest::prelude::*;

const D: f64 = 20.0;

/// Gentle random terrain: slopes stay well below one so the mesh is valid.
fn terrain_mesh(n: (usize, usize, usize), bumps: &[f64], ratio: f64) -> StructuredMesh {
    let (n1, n2) = (n.0 + 1, n.1 + 1);
    let elevation = (0..n1 * n2).map(|p| 5.0 * bumps[p % bumps.len()]).collect();
    let t = TerrainSurface::new(n1, n2, D, D, (0.0, 0.0), elevation).unwrap();
    build_mesh(&t, &generate_levels(n.2, 20.0 * n.2 as f64, ratio).unwrap()).unwrap()
}

fn mesh_strategy() -> impl Strategy<Value = StructuredMesh> {
    ((2usize..5, 2usize..5, 2usize..5), prop::collection::vec(-1.0f64..1.0, 1..40), 1.0f64..1.4)
        .prop_map(|(n, bumps, ratio)| terrain_mesh(n, &bumps, ratio))
}

/// Random plan keeping layer 0 and the top with gaps of one or two.
fn plan_strategy(layers: usize) -> impl Strategy<Value = CoarseningPlan> {
    (any::<bool>(), prop::collection::vec(any::<bool>(), layers)).prop_map(move |(horizontal, merge)| {
        let mut kept = vec![0];
        let mut k = 0;
        while k < layers {
            k += if merge[k] && k + 2 <= layers { 2 } else { 1 };
            kept.push(k);
        }
        CoarseningPlan {
            horizontal,
            kept_layers: kept,
        }
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stiffness_is_symmetric_with_zero_row_sums(mesh in mesh_strategy(), a3 in 0.1f64..50.0) {
        let penalty = PenaltyTensor::new(1.0, 1.0, a3).unwrap();
        let u0 = WindField::uniform(mesh.cell_dims(), [1.0, 0.0, 0.0]).unwrap();
        let (op, _) = assemble_unconstrained(&mesh, &penalty, &u0).unwrap();
        let k = to_dense(&op);
        let scale = k.diagonal().amax();
        prop_assert!((&k - k.transpose()).amax() <= 1e-12 * scale);
        for r in 0..k.nrows() {
            prop_assert!(k.row(r).sum().abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn constrained_operator_is_positive(mesh in mesh_strategy(), a3 in 0.1f64..50.0, seed in any::<u64>()) {
        let penalty = PenaltyTensor::new(1.0, 1.0, a3).unwrap();
        let u0 = WindField::uniform(mesh.cell_dims(), [1.0, 2.0, 0.0]).unwrap();
        let (op, f) = assemble(&mesh, &penalty, &u0).unwrap();
        let mut x = random_vec(op.dims().len(), seed);
        for (v, m) in x.iter_mut().zip(op.dirichlet_mask()) {
            if *m {
                *v = 0.0;
            }
        }
        let kx = to_dense(&op) * nalgebra::DVector::from_vec(x.clone());
        prop_assert!(dot(&x, kx.as_slice()) > 0.0);
        for (v, m) in f.values().iter().zip(op.dirichlet_mask()) {
            prop_assert!(!*m || *v == 0.0);
        }
    }

    #[test]
    fn restriction_is_transpose_of_prolongation(
        (n1, n2, plan) in (1usize..4, 1usize..4, 1usize..7)
            .prop_flat_map(|(a, b, layers)| (Just(2 * a + 1), Just(2 * b + 1), plan_strategy(layers))),
        seed in any::<u64>(),
    ) {
        let fine = Dims::new(n1, n2, plan.top() + 1);
        let p = build_prolongation(&plan, fine).unwrap();
        let c = random_vec(p.coarse_dims().len(), seed);
        let f = random_vec(fine.len(), seed ^ 0x5eed);
        let lhs = dot(&p.prolong(&c).unwrap(), &f);
        let rhs = dot(&c, &p.restrict(&f).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        let dense = dense_prolongation(&plan, fine) * nalgebra::DVector::from_vec(c.clone());
        prop_assert!(rel_err(&p.prolong(&c).unwrap(), dense.as_slice()) < 1e-14);
    }

    #[test]
    fn galerkin_operator_stays_symmetric(
        (mesh, plan) in (1usize..3, 1usize..3, 2usize..5, prop::collection::vec(-1.0f64..1.0, 1..20))
            .prop_flat_map(|(a, b, layers, bumps)| {
                (Just(terrain_mesh((2 * a, 2 * b, layers), &bumps, 1.2)), plan_strategy(layers))
            }),
        a3 in 0.1f64..50.0,
    ) {
        let penalty = PenaltyTensor::new(1.0, 1.0, a3).unwrap();
        let u0 = WindField::uniform(mesh.cell_dims(), [1.0, 0.0, 0.0]).unwrap();
        let (op, _) = assemble(&mesh, &penalty, &u0).unwrap();
        let p = build_prolongation(&plan, op.dims()).unwrap();
        let kc = to_dense(&galerkin_coarsen(&op, &p).unwrap());
        let scale = kc.diagonal().amax();
        prop_assert!((&kc - kc.transpose()).amax() <= 1e-12 * scale);
        for r in 0..kc.nrows() {
            prop_assert!(kc[(r, r)] > 0.0);
        }
    }
}
