//! Asymmetric Lp-projection bodies: the tau-weighted cosine kernel, the
//! covariance law under linear images, and the boundary variant that
//! excludes facets through the origin.

use std::sync::Arc;

use lpbm::body::{LinearMap, Polytope, Support};
use lpbm::spherical::DirectionGrid;
use lpbm::transform;
use nalgebra::Vector3;

fn main() {
    let grid = Arc::new(DirectionGrid::build(2, 360).unwrap());
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();

    // For p = 2 and tau = 0 the projection body of the square is a disc of
    // radius 2.
    let pi2 = transform::projection_body(&square, 2.0, 0.0, &grid).unwrap();
    let (min, max) = grid
        .directions()
        .iter()
        .map(|u| pi2.support(u))
        .fold((f64::MAX, f64::MIN), |(lo, hi), h| (lo.min(h), hi.max(h)));
    println!("projection body of the square at p=2: support range [{min:.9}, {max:.9}]");

    // tau != 0 weights the two sides of each hyperplane differently, which
    // shifts the body for non-symmetric inputs.
    let tri = Polytope::from_points(
        2,
        &[
            Vector3::new(1.2, -0.4, 0.0),
            Vector3::new(-0.5, 1.0, 0.0),
            Vector3::new(-0.4, -0.6, 0.0),
        ],
    )
    .unwrap();
    for tau in [0.0, 0.5, 1.0] {
        let h_pos = transform::projection_support(&tri, 2.0, tau, &Vector3::x()).unwrap();
        let h_neg = transform::projection_support(&tri, 2.0, tau, &(-Vector3::x())).unwrap();
        println!("triangle, tau={tau}: h(+e1)={h_pos:.6}, h(-e1)={h_neg:.6}");
    }

    // Covariance: h(projection of phi K, x) = |det phi|^{1/p} h(projection
    // of K, phi^{-1} x).
    let p = 2.5;
    let phi = LinearMap::from_2d(1.3, 0.4, -0.2, 0.9).unwrap();
    let mapped = square.apply_linear(&phi).unwrap();
    let x = Vector3::new(0.6, 0.8, 0.0);
    let lhs = transform::projection_support(&mapped, p, 0.0, &x).unwrap();
    let rhs = phi.det().abs().powf(1.0 / p)
        * transform::projection_support(&square, p, 0.0, &phi.inverse().apply(&x)).unwrap();
    println!("covariance check at p={p}: {lhs:.12} vs {rhs:.12}");

    // The boundary variant drops facets whose hyperplane passes through the
    // origin and requires the origin outside the body.
    let shifted = Polytope::from_points(
        2,
        &[
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        ],
    )
    .unwrap();
    let outside = Polytope::from_points(
        2,
        &[
            Vector3::new(1.0, 1.0, 0.0),
            Vector3::new(2.0, 1.0, 0.0),
            Vector3::new(1.0, 2.0, 0.0),
        ],
    )
    .unwrap();
    println!(
        "full transform rejects origin on the boundary: {:?}",
        transform::projection_support(&shifted, 2.0, 0.0, &Vector3::x()).unwrap_err()
    );
    let boundary = transform::projection_body_boundary(&shifted, 2.0, 0.0, &grid).unwrap();
    println!(
        "boundary variant of the same triangle: mean support {:.6}",
        boundary.mean_support()
    );
    println!(
        "boundary variant rejects an exterior origin: {:?}",
        transform::projection_body_boundary(&outside, 2.0, 0.0, &grid).unwrap_err()
    );
}
