//! Surface area measures of polytopes: the classical measure S, the
//! Lp-version S_p with density h^{1-p}, and their behavior under dilation.

use lpbm::body::Polytope;

fn main() {
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
    let cube = Polytope::cuboid(3, &[1.0, 1.0, 1.0]).unwrap();
    let octa = Polytope::cross_polytope(3, 1.0).unwrap();

    for (name, k) in [("square", &square), ("cube", &cube), ("octahedron", &octa)] {
        let s = k.surface_area_measure();
        println!(
            "{name}: volume {:.6}, surface area {:.6}, facet atoms {}",
            k.volume(),
            s.total_mass(),
            s.len()
        );
    }

    // S_p weights each facet by h^{1-p}; for the unit cube every support
    // value is 1, so S_p and S coincide for every p.
    for p in [1.5, 2.0, 3.0] {
        let sp = cube.lp_surface_area_measure(p).unwrap();
        println!(
            "cube S_{p}: total mass {:.6} (equals surface area {:.6})",
            sp.total_mass(),
            cube.surface_area_measure().total_mass()
        );
    }

    // Dilation scales S_p total mass by lambda^{n-p}.
    let p = 2.5;
    let lambda = 2.0f64;
    let base = octa.lp_surface_area_measure(p).unwrap().total_mass();
    let dil = octa
        .dilated(lambda)
        .lp_surface_area_measure(p)
        .unwrap()
        .total_mass();
    println!(
        "octahedron S_{p} under dilation by {lambda}: ratio {:.6}, predicted {:.6}",
        dil / base,
        lambda.powf(3.0 - p)
    );

    // The Lp mixed volume recovers volume on the diagonal.
    let v = cube.mixed_volume_p(&cube, p).unwrap();
    println!(
        "V_{p}(cube, cube) = {:.9}, volume = {:.9}",
        v,
        cube.volume()
    );
}
