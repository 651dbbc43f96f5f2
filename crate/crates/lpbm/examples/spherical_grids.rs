//! Direction grids and discrete measures on the sphere: quadrature
//! weights, antipodal structure, even parts, and the concentration check
//! that gates the Minkowski solver.

use lpbm::spherical::{DirectionGrid, DiscreteMeasure};

fn main() {
    let grid2 = DirectionGrid::build(2, 360).unwrap();
    let grid3 = DirectionGrid::build(3, 2562).unwrap();
    println!(
        "planar grid: {} directions, weight sum {:.6} (circle length {:.6})",
        grid2.len(),
        grid2.weights().iter().sum::<f64>(),
        std::f64::consts::TAU
    );
    println!(
        "spatial grid: {} directions, weight sum {:.6} (sphere area {:.6})",
        grid3.len(),
        grid3.weights().iter().sum::<f64>(),
        4.0 * std::f64::consts::PI
    );

    // Quadrature: integrate u_x^2 over the unit circle; the exact value is pi.
    let second_moment = grid2.integrate(|u| u.x * u.x);
    println!(
        "integral of u_x^2 over the circle: {:.9} (exact {:.9})",
        second_moment,
        std::f64::consts::PI
    );

    // Every direction has a bit-exact antipode on both grids.
    for grid in [&grid2, &grid3] {
        let i = grid.len() / 3;
        let j = grid.antipode_index()[i];
        let gap = (grid.direction(i) + grid.direction(j)).norm();
        println!("antipode gap at index {i}: {gap:.1e}");
    }

    // A measure concentrated near one great circle fails the solver
    // precondition; the uniform measure passes it.
    let uniform = DiscreteMeasure::lebesgue(&grid2);
    println!(
        "uniform measure: total mass {:.6}, even {}, concentration gap {:.4}",
        uniform.total_mass(),
        uniform.is_even(),
        uniform.concentration_gap().unwrap()
    );
    let spiky: Vec<f64> = grid2
        .directions()
        .iter()
        .map(|u| if u.x.abs() < 1e-6 { 1.0 } else { 0.0 })
        .collect();
    let concentrated = DiscreteMeasure::on_grid(&grid2, spiky).unwrap();
    println!(
        "concentrated measure rejected: {:?}",
        concentrated.check_minkowski_data().unwrap_err()
    );

    // The even part symmetrizes mass across antipodes.
    let skew: Vec<f64> = grid2
        .directions()
        .iter()
        .map(|u| 1.0 + 0.5 * u.x)
        .collect();
    let skewed = DiscreteMeasure::on_grid(&grid2, skew).unwrap();
    let even = skewed.even_part();
    println!(
        "skewed measure even: {}, its even part even: {}, masses preserved: {:.6} vs {:.6}",
        skewed.is_even(),
        even.is_even(),
        skewed.total_mass(),
        even.total_mass()
    );
}
