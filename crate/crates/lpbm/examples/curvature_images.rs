//! Normalized and plain Lp-curvature images: solving the Minkowski problem
//! for radial-power data, the homogeneity degree -n/p-1, and the conversion
//! between the two normalizations.

use std::sync::Arc;

use lpbm::blaschke;
use lpbm::body::{hausdorff_distance, Polytope, Support};
use lpbm::minkowski::SolverConfig;
use lpbm::spherical::DirectionGrid;

fn main() {
    let grid = Arc::new(DirectionGrid::build(2, 360).unwrap());
    let cfg = SolverConfig {
        residual_tol: 1e-6,
        ..SolverConfig::default()
    };

    // The normalized curvature image of the unit disc is a disc of radius
    // kappa_2^(-1/p).
    let disc = Polytope::ball_approximation(&grid, 1.0).unwrap();
    let p = 2.5;
    let img = blaschke::normalized_curvature_image(&disc, p, &grid, &cfg).unwrap();
    let radius = img.facets().iter().map(|f| f.offset).sum::<f64>() / img.facets().len() as f64;
    println!(
        "normalized curvature image of the unit disc (p={p}): radius {:.6}, expected {:.6}",
        radius,
        std::f64::consts::PI.powf(-1.0 / p)
    );

    // Homogeneity: dilating the input by 2 scales the image by 2^(-n/p-1).
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
    let base = blaschke::normalized_curvature_image(&square, p, &grid, &cfg).unwrap();
    let doubled = blaschke::normalized_curvature_image(&square.dilated(2.0), p, &grid, &cfg)
        .unwrap();
    let u = grid.direction(17);
    println!(
        "dilation by 2: support ratio {:.6}, predicted {:.6}",
        doubled.support(&u) / base.support(&u),
        2.0f64.powf(-2.0 / p - 1.0)
    );

    // The plain curvature image is the normalized one dilated by
    // V^{1/(p-n)}; the unit disc is its fixed point for every valid p.
    let plain = blaschke::curvature_image(&disc, p, &grid, &cfg).unwrap();
    println!(
        "plain curvature image of the unit disc: distance to the disc {:.3e}",
        hausdorff_distance(&plain, &disc, &grid)
    );
    let converted = base.dilated(base.volume().powf(1.0 / (p - 2.0)));
    let direct = blaschke::curvature_image(&square, p, &grid, &cfg).unwrap();
    println!(
        "plain vs rescaled normalized (square): distance {:.3e}",
        hausdorff_distance(&converted, &direct, &grid)
    );

    // p equal to the dimension has no plain normalization.
    println!(
        "p = n rejected for the plain image: {:?}",
        blaschke::curvature_image(&disc, 2.0, &grid, &cfg).unwrap_err()
    );
}
