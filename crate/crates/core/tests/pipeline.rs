mod common;

use common::*;
use femwind::mesh::{generate_levels, synthetic_terrain, TerrainKind, TerrainSurface};
use femwind::pipeline::{downscale, downscale_on_mesh, DownscaleRequest};
use femwind::{CycleParams, Error, PenaltyTensor, WindField, WindSpec};

fn params() -> CycleParams {
    CycleParams {
        rel_tol: 1e-12,
        max_cycles: 100,
        ..Default::default()
    }
}

fn ridge_request(wind: WindSpec, penalty: PenaltyTensor) -> DownscaleRequest {
    let terrain = synthetic_terrain(
        TerrainKind::Ridge {
            amplitude: 60.0,
            sigma: 100.0,
            center_x: None,
        },
        17,
        17,
        25.0,
        25.0,
    )
    .unwrap();
    DownscaleRequest {
        terrain,
        levels: generate_levels(8, 400.0, 1.3).unwrap(),
        penalty,
        wind,
        params: params(),
        warm_start: None,
    }
}

#[test]
fn multiplier_is_linear_in_initial_wind() {
    let mesh = hill_mesh(12, 12, 6, 30.0, 50.0, 80.0, 300.0, 1.3);
    let c = mesh.cell_dims();
    let pen = PenaltyTensor::new(1.0, 1.0, 2.0).unwrap();
    let a = WindField::from_values(c, random_vec(3 * c.len(), 41).chunks(3).map(|v| [v[0], v[1], v[2]]).collect()).unwrap();
    let b = WindField::uniform(c, [2.0, -1.0, 0.3]).unwrap();
    let sum = WindField::from_values(
        c,
        a.values().iter().zip(b.values()).map(|(x, y)| [x[0] + 2.0 * y[0], x[1] + 2.0 * y[1], x[2] + 2.0 * y[2]]).collect(),
    )
    .unwrap();
    let run = |u: WindField| downscale_on_mesh(mesh.clone(), u, &pen, &params(), None).unwrap().lambda;
    let la = run(a);
    let lb = run(b);
    let ls = run(sum);
    let combo: Vec<f64> = la.values().iter().zip(lb.values()).map(|(x, y)| x + 2.0 * y).collect();
    assert!(rel_err(ls.values(), &combo) < 1e-9);
}

#[test]
fn warm_start_from_solution_needs_no_cycles() {
    let req = ridge_request(WindSpec::Uniform([5.0, 0.0, 0.0]), PenaltyTensor::identity());
    let first = downscale(&req).unwrap();
    assert!(first.report.cycles_used > 1);
    let mut again = req.clone();
    again.warm_start = Some(first.lambda.clone());
    let second = downscale(&again).unwrap();
    assert!(second.report.cycles_used <= 1);
    assert!(second.wind.max_abs_diff(&first.wind) < 1e-8);
}

#[test]
fn ridge_flow_is_mirror_symmetric() {
    // Wind across a y-invariant ridge: v is odd and u, w even about the
    // domain's mid-plane in y.
    let res = downscale(&ridge_request(WindSpec::Uniform([5.0, 0.0, 0.0]), PenaltyTensor::identity())).unwrap();
    let c = res.wind.dims();
    for k in 0..c.n3 {
        for j in 0..c.n2 {
            for i in 0..c.n1 {
                let a = res.wind.get(i, j, k);
                let b = res.wind.get(i, c.n2 - 1 - j, k);
                assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] + b[1]).abs() < 1e-8 && (a[2] - b[2]).abs() < 1e-8);
            }
        }
    }
    assert!(res.diagnostics.max_change > 0.1);
}

#[test]
fn large_vertical_penalty_suppresses_vertical_change() {
    let run = |a3: f64| {
        let res = downscale(&ridge_request(WindSpec::Uniform([5.0, 0.0, 0.0]), PenaltyTensor::new(1.0, 1.0, a3).unwrap())).unwrap();
        let w = res.wind.values().iter().zip(res.initial_wind.values()).fold(0.0f64, |m, (u, v)| m.max((u[2] - v[2]).abs()));
        let h = res.wind.values().iter().zip(res.initial_wind.values()).fold(0.0f64, |m, (u, v)| m.max((u[0] - v[0]).abs()));
        w / h
    };
    assert!(run(10.0) < run(1.0));
}

#[test]
fn log_profile_runs_and_improves_consistency() {
    let req = ridge_request(
        WindSpec::LogProfile {
            speed: 6.0,
            direction: 10.0,
            roughness_length: 0.2,
            reference_height: 10.0,
        },
        PenaltyTensor::new(1.0, 1.0, 1.0).unwrap(),
    );
    let res = downscale(&req).unwrap();
    assert!(res.report.converged);
    assert!(res.diagnostics.divergence.l2 < 0.1 * res.diagnostics.initial_divergence.l2);
}

#[test]
fn unequal_horizontal_penalty_is_unsupported() {
    let req = ridge_request(WindSpec::Uniform([1.0, 0.0, 0.0]), PenaltyTensor::new(1.0, 2.0, 1.0).unwrap());
    assert!(matches!(downscale(&req), Err(Error::Unsupported(_))));
}

#[test]
fn steep_terrain_is_rejected_before_solving() {
    let mut e = vec![0.0; 25];
    e[12] = 1000.0;
    let terrain = TerrainSurface::new(5, 5, 1.0, 1.0, (0.0, 0.0), e).unwrap();
    let req = DownscaleRequest {
        terrain,
        levels: generate_levels(3, 5.0, 1.0).unwrap(),
        penalty: PenaltyTensor::identity(),
        wind: WindSpec::Uniform([1.0, 0.0, 0.0]),
        params: params(),
        warm_start: None,
    };
    assert!(downscale(&req).is_err());
}

#[test]
fn external_wind_dims_are_checked() {
    let req = ridge_request(
        WindSpec::Cells(WindField::uniform(femwind::Dims::new(2, 2, 2), [1.0, 0.0, 0.0]).unwrap()),
        PenaltyTensor::identity(),
    );
    assert!(matches!(downscale(&req), Err(Error::DimensionMismatch(_))));
}

#[test]
fn concurrent_requests_agree() {
    let req = ridge_request(WindSpec::Uniform([3.0, 1.0, 0.0]), PenaltyTensor::identity());
    let base = downscale(&req).unwrap();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..3).map(|_| s.spawn(|| downscale(&req).unwrap())).collect();
        for h in handles {
            let r = h.join().unwrap();
            assert_eq!(r.lambda.values(), base.lambda.values());
        }
    });
}
