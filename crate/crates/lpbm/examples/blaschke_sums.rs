//! Lp-Blaschke sums: combining origin-symmetric bodies by adding their
//! (normalized) Lp surface area data and solving the result back to a body.

use std::sync::Arc;

use lpbm::blaschke;
use lpbm::body::Polytope;
use lpbm::minkowski::SolverConfig;
use lpbm::spherical::DirectionGrid;

fn main() {
    let cfg = SolverConfig::default();
    let grid = Arc::new(DirectionGrid::build(2, 360).unwrap());
    let disc = Polytope::ball_approximation(&grid, 1.0).unwrap();

    // Normalized sum of two unit discs at p=2: a disc of radius 2^(-1/2).
    let sum = blaschke::normalized_blaschke_sum(&disc, &disc, 2.0, &cfg).unwrap();
    let radius = sum.facets().iter().map(|f| f.offset).sum::<f64>() / sum.facets().len() as f64;
    println!(
        "normalized sum of two unit discs (p=2): radius {:.9}, expected {:.9}",
        radius,
        0.5f64.sqrt()
    );

    // Plain sum of two unit discs at p=3: a disc of radius 1/2; adding a
    // third gives 1/3.
    let two = blaschke::blaschke_sum(&disc, &disc, 3.0, &cfg).unwrap();
    let three = blaschke::blaschke_sum(&two, &disc, 3.0, &cfg).unwrap();
    let mean = |k: &Polytope| k.facets().iter().map(|f| f.offset).sum::<f64>() / k.facets().len() as f64;
    println!(
        "plain sums of unit discs (p=3): two -> {:.9} (expect 1/2), three -> {:.9} (expect 1/3)",
        mean(&two),
        mean(&three)
    );

    // The defining equation of the plain sum: its Lp data is the sum of the
    // inputs' Lp data.
    let p = 2.5;
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
    let cross = Polytope::cross_polytope(2, 1.2).unwrap();
    let combined = blaschke::blaschke_sum(&square, &cross, p, &cfg).unwrap();
    let target = square
        .lp_surface_area_measure(p)
        .unwrap()
        .add(&cross.lp_surface_area_measure(p).unwrap())
        .unwrap();
    let res = lpbm::minkowski::residual(&combined, p, &target, false).unwrap();
    println!("square (+) cross-polytope at p={p}: data residual {res:.3e}");

    // Asymmetric inputs are rejected.
    let tri = Polytope::from_points(
        2,
        &[
            nalgebra::Vector3::new(1.0, -0.5, 0.0),
            nalgebra::Vector3::new(-0.5, 1.0, 0.0),
            nalgebra::Vector3::new(-0.5, -0.5, 0.0),
        ],
    )
    .unwrap();
    println!(
        "asymmetric input rejected: {:?}",
        blaschke::blaschke_sum(&tri, &square, p, &cfg).unwrap_err()
    );
}
