//! Lp-centroid and Lp-moment bodies, built from volume integrals of the
//! tau-weighted cosine kernel, and the calibration constant that makes the
//! centroid body of the unit ball the unit ball itself.

use std::sync::Arc;

use lpbm::body::Polytope;
use lpbm::spherical::DirectionGrid;
use lpbm::transform;
use nalgebra::Vector3;

fn main() {
    let grid = Arc::new(DirectionGrid::build(2, 360).unwrap());
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();

    // Moment body of the square at p=2, tau=0: h(e1)^2 is the second moment
    // of the square in the x-direction, 4/3.
    let h = transform::moment_support(&square, 2.0, 0.0, &Vector3::x()).unwrap();
    println!(
        "moment body of [-1,1]^2 at p=2: h(e1)^2 = {:.9} (exact {:.9})",
        h * h,
        4.0 / 3.0
    );

    // tau shifts mass between the two halfspaces; a symmetric body stays
    // symmetric, a triangle does not.
    let tri = Polytope::from_points(
        2,
        &[
            Vector3::new(1.5, -0.5, 0.0),
            Vector3::new(-0.5, 1.0, 0.0),
            Vector3::new(-0.5, -0.5, 0.0),
        ],
    )
    .unwrap();
    for (name, k) in [("square", &square), ("triangle", &tri)] {
        let plus = transform::moment_support(k, 2.0, 0.5, &Vector3::x()).unwrap();
        let minus = transform::moment_support(k, 2.0, 0.5, &(-Vector3::x())).unwrap();
        println!("{name}, tau=0.5: h(+e1)={plus:.6}, h(-e1)={minus:.6}");
    }

    // The calibration constant normalizes the centroid body so the unit
    // ball is a fixed point; in the plane at p=2 it equals 1/4.
    let c = transform::calibrate_cnp(&grid, 2.0).unwrap();
    println!("calibration constant (dim 2, p=2): {:.9} (exact 0.25)", c.value);
    let ball = Polytope::ball_approximation(&grid, 1.0).unwrap();
    let gb = transform::centroid_body(&ball, 2.0, &grid).unwrap();
    println!(
        "centroid body of the unit ball: mean support {:.6} (expect 1)",
        gb.mean_support()
    );

    // The centroid body support solves an integral identity against the
    // radial-power data of the body.
    let p = 2.5;
    let n = 2.0;
    let c = transform::calibrate_cnp(&grid, p).unwrap();
    let mu = lpbm::blaschke::curvature_data(&square, p, &grid).unwrap();
    let u = Vector3::new(0.6, 0.8, 0.0);
    let lhs = transform::centroid_support(&square, p, &grid, &u)
        .unwrap()
        .powf(p)
        * (n + p)
        * c.value
        * square.volume();
    let rhs = transform::cosine_transform(&mu, p, &u).unwrap();
    println!("centroid-cosine identity at p={p}: {lhs:.6} vs {rhs:.6}");
}
