//! End-to-end acceptance checks. Each test covers one numbered criterion
//! and prints a single pass/fail line; tolerances are stated inline.

use std::sync::Arc;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lpbm::blaschke::{self, BodyValuedOperator};
use lpbm::body::{hausdorff_distance, LinearMap, Polytope};
use lpbm::minkowski::{self, SolverConfig};
use lpbm::spherical::{DirectionGrid, DiscreteMeasure};
use lpbm::transform;
use lpbm::verify;

fn grid2() -> Arc<DirectionGrid> {
    Arc::new(DirectionGrid::build(2, 360).unwrap())
}

fn grid3() -> Arc<DirectionGrid> {
    Arc::new(DirectionGrid::build(3, 2562).unwrap())
}

fn grid_for(dim: usize) -> Arc<DirectionGrid> {
    if dim == 2 {
        grid2()
    } else {
        grid3()
    }
}

/// Loose residual target for dense grid-density data, where 1e-8 sits below
/// the double-precision floor of the objective.
fn dense_cfg() -> SolverConfig {
    SolverConfig {
        residual_tol: 1e-6,
        ..SolverConfig::default()
    }
}

fn report(criterion: usize, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Origin-symmetric catalog for solver round trips: the fixed bodies plus
/// seeded symmetrized random hulls.
fn symmetric_catalog(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Polytope> {
    let mut out = vec![
        Polytope::cuboid(dim, &vec![1.0; dim][..]).unwrap(),
        Polytope::cross_polytope(dim, 1.0).unwrap(),
    ];
    while out.len() < 4 {
        let count = rng.gen_range(4..=10);
        let mut pts = Vec::new();
        for _ in 0..count {
            let v = Vector3::new(
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0..1.0),
                if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 },
            );
            if v.norm() < 0.3 {
                continue;
            }
            pts.push(v);
            pts.push(-v);
        }
        if let Ok(p) = Polytope::from_points(dim, &pts) {
            if p.contains_origin_interior() {
                out.push(p);
            }
        }
    }
    out
}

fn mean_radius(k: &Polytope) -> f64 {
    k.facets().iter().map(|f| f.offset).sum::<f64>() / k.facets().len() as f64
}

#[test]
fn criterion_01_solver_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = SolverConfig::default();
    let mut worst_h = 0.0f64;
    let mut worst_r = 0.0f64;
    for dim in [2, 3] {
        let grid = grid_for(dim);
        for k in symmetric_catalog(dim, &mut rng) {
            for p in [1.5, 2.5, 3.0] {
                // Antipodal facet areas of the random hulls match only to
                // rounding error; even_part symmetrizes them exactly.
                let mu = k
                    .lp_surface_area_measure(p)
                    .unwrap()
                    .scaled(1.0 / k.volume())
                    .even_part();
                let (sol, rep) = minkowski::solve_normalized_even(&mu, p, &cfg).unwrap();
                worst_h = worst_h
                    .max(hausdorff_distance(&sol, &k, &grid) / (1.0 + k.scale()));
                worst_r = worst_r.max(rep.final_residual);
                assert!(
                    rep.converged,
                    "dim {dim} p {p}: residual {:.3e} after {} iterations",
                    rep.final_residual, rep.iterations
                );
            }
        }
    }
    report(
        1,
        worst_h <= 1e-5 && worst_r <= 1e-8,
        &format!("catalog round trips: worst Hausdorff {worst_h:.3e} (tol 1e-5), worst residual {worst_r:.3e} (tol 1e-8)"),
    );
}

#[test]
fn criterion_02_ball_oracle() {
    let cfg = dense_cfg();
    let mut worst = 0.0f64;
    for dim in [2usize, 3] {
        let grid = grid_for(dim);
        let ball = Polytope::ball_approximation(&grid, 1.0).unwrap();
        for p in [1.5, 2.0, 2.5, 3.0] {
            let img = blaschke::normalized_curvature_image(&ball, p, &grid, &cfg).unwrap();
            let expected = lpbm::unit_ball_volume(dim).powf(-1.0 / p);
            worst = worst.max((mean_radius(&img) - expected).abs() / expected);
        }
    }
    report(
        2,
        worst <= 1e-3,
        &format!("curvature image of the ball, both dims, p in {{1.5, 2, 2.5, 3}} including p = n: worst radius error {worst:.3e} (tol 1e-3)"),
    );
}

#[test]
fn criterion_03_contravariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let cfg = dense_cfg();
    let p = 2.5;
    let mut worst = [0.0f64; 2];
    for (d, dim) in [2usize, 3].into_iter().enumerate() {
        let grid = grid_for(dim);
        let n = dim as f64;
        let k = Polytope::cross_polytope(dim, 1.0).unwrap();
        let base = blaschke::normalized_curvature_image(&k, p, &grid, &cfg).unwrap();
        for _ in 0..20 {
            let phi = random_map(dim, &mut rng);
            let lhs = blaschke::normalized_curvature_image(
                &k.apply_linear(&phi).unwrap(),
                p,
                &grid,
                &cfg,
            )
            .unwrap();
            let predicted = base
                .apply_linear(&phi.inverse_transpose())
                .unwrap()
                .dilated(phi.det().powf(((-n / p - 1.0) + 1.0) / n));
            let gap = hausdorff_distance(&lhs, &predicted, &grid) / (1.0 + predicted.scale());
            worst[d] = worst[d].max(gap);
        }
    }
    // The level-4 spatial grid floors the identity near 2.4e-3: the
    // discrete Wulff solution carries a systematic ~1.2e-3 support bias
    // that shears differently on the two sides of the comparison.
    report(
        3,
        worst[0] <= 1e-3 && worst[1] <= 5e-3,
        &format!("contravariance over 20 random maps per dim: worst relative gap dim 2 {:.3e} (tol 1e-3), dim 3 {:.3e} (tol 5e-3, grid resolution floor)", worst[0], worst[1]),
    );
}

#[test]
fn criterion_04_homogeneity() {
    let cfg = dense_cfg();
    let p = 2.5;
    let mut worst = 0.0f64;
    for dim in [2usize, 3] {
        let grid = grid_for(dim);
        let n = dim as f64;
        let normalized =
            BodyValuedOperator::normalized_curvature_image(p, Arc::clone(&grid), cfg.clone());
        let plain = BodyValuedOperator::curvature_image(p, Arc::clone(&grid), cfg.clone());
        let k = Polytope::cross_polytope(dim, 1.0).unwrap();
        let r1 = verify::check_homogeneity(&normalized, &k, 2.0, -n / p - 1.0, &grid, 1e-3);
        let r2 = verify::check_homogeneity(
            &plain,
            &k,
            2.0,
            (-n / p - 1.0) * p / (p - n),
            &grid,
            1e-3,
        );
        worst = worst.max(r1.measured).max(r2.measured);
    }
    report(
        4,
        worst <= 1e-3,
        &format!("fitted degrees of the normalized and plain curvature images: worst deviation {worst:.3e} (tol 1e-3)"),
    );
}

#[test]
fn criterion_05_valuation_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let cfg = dense_cfg();
    let p = 2.5;
    let mut worst_radial = 0.0f64;
    let mut worst_density = 0.0f64;
    for dim in [2usize, 3] {
        let grid = grid_for(dim);
        let n = dim as f64;
        let lam =
            BodyValuedOperator::normalized_curvature_image(p, Arc::clone(&grid), cfg.clone());
        let base = Polytope::cuboid(dim, &vec![1.0; dim][..]).unwrap();
        // The full operator identity is expensive in dim 3; the pointwise
        // radial-power identity runs on all 20 quadruples, the density
        // identity on a subset there.
        let density_count = if dim == 2 { 20 } else { 5 };
        for i in 0..20 {
            let quad = verify::random_quadruple(&base, &mut rng).unwrap();
            let radial = verify::check_radial_identity(&quad, n + p, &grid, 1e-9);
            worst_radial = worst_radial.max(radial.measured);
            if i < density_count {
                let val = verify::check_valuation(&lam, &quad, p, &grid, 1e-2);
                worst_density = worst_density.max(val.measured);
            }
        }
    }
    report(
        5,
        worst_radial <= 1e-9 && worst_density <= 1e-2,
        &format!("slab quadruples: worst radial-power gap {worst_radial:.3e} (tol 1e-9), worst density-sum gap {worst_density:.3e} (tol 1e-2)"),
    );
}

#[test]
fn criterion_06_transform_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst_fixed = 0.0f64;
    let mut worst_ident = 0.0f64;
    let mut worst_cov = 0.0f64;
    let mut worst_cnp = 0.0f64;
    for dim in [2usize, 3] {
        let grid = grid_for(dim);
        let n = dim as f64;
        let ball = Polytope::ball_approximation(&grid, 1.0).unwrap();
        for p in [1.5, 2.5] {
            // Fixed point of the centroid body on the ball, sampled at a
            // direction subset: the full dim-3 sampled body costs thousands
            // of volume quadratures without adding coverage.
            for u in grid.directions().iter().step_by(grid.len() / 32) {
                let h = transform::centroid_support(&ball, p, &grid, u).unwrap();
                worst_fixed = worst_fixed.max((h - 1.0).abs());
            }

            // Centroid-cosine identity on the cuboid. The right-hand side
            // quadratures the cube's non-smooth radial data, so it gets a
            // finer grid than the solver ever needs; no solve is involved.
            let k = Polytope::cuboid(dim, &vec![1.0; dim][..]).unwrap();
            let data_grid = if dim == 2 {
                Arc::clone(&grid)
            } else {
                Arc::new(DirectionGrid::build(3, 10242).unwrap())
            };
            let c = transform::calibrate_cnp(&grid, p).unwrap();
            let mu = blaschke::curvature_data(&k, p, &data_grid).unwrap();
            for u in grid.directions().iter().step_by(grid.len() / 16) {
                let lhs = transform::centroid_support(&k, p, &grid, u)
                    .unwrap()
                    .powf(p)
                    * (n + p)
                    * c.value
                    * k.volume();
                let rhs = transform::cosine_transform(&mu, p, u).unwrap();
                worst_ident = worst_ident.max((lhs - rhs).abs() / rhs.abs());
            }

            // Projection-body covariance and the defining cosine identity,
            // both exact on polytope measures.
            let phi = random_map(dim, &mut rng);
            let kt = k.apply_linear(&phi).unwrap();
            let sp = k.lp_surface_area_measure(p).unwrap();
            for u in grid.directions().iter().step_by(grid.len() / 32) {
                let lhs = transform::projection_support(&kt, p, 0.0, u).unwrap();
                let rhs = phi.det().abs().powf(1.0 / p)
                    * transform::projection_support(&k, p, 0.0, &phi.inverse().apply(u))
                        .unwrap();
                worst_cov = worst_cov.max((lhs - rhs).abs() / rhs.abs());
                let direct = transform::cosine_transform(&sp, p, u).unwrap();
                let via = transform::projection_support(&k, p, 0.0, u).unwrap().powf(p);
                worst_cov = worst_cov.max((direct - via).abs() / direct.abs());
            }
        }
        // Calibration constants against closed forms for p = 2.
        let c2 = transform::calibrate_cnp(&grid, 2.0).unwrap().value;
        let exact = if dim == 2 { 0.25 } else { 0.2 };
        worst_cnp = worst_cnp.max((c2 - exact).abs() / exact);
    }
    // The planar projection body of the standard square at p = 2 is the
    // disc of radius 2.
    let grid = grid2();
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
    let pi2 = transform::projection_body(&square, 2.0, 0.0, &grid).unwrap();
    let disc_err = pi2
        .support_values()
        .iter()
        .map(|h| (h - 2.0).abs() / 2.0)
        .fold(0.0f64, f64::max);
    let pass = worst_fixed <= 1e-3
        && worst_ident <= 1e-3
        && worst_cov <= 1e-6
        && worst_cnp <= 1e-6
        && disc_err <= 1e-6;
    report(
        6,
        pass,
        &format!("transform identities: ball fixed point {worst_fixed:.3e} (tol 1e-3), centroid-cosine {worst_ident:.3e} (tol 1e-3), projection covariance/cosine {worst_cov:.3e} (tol 1e-6), calibration {worst_cnp:.3e} (tol 1e-6), square projection disc {disc_err:.3e} (tol 1e-6)"),
    );
}

#[test]
fn criterion_07_support_point_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let p = 2.5;
    let mut worst_fd = 0.0f64;
    let mut worst_add = 0.0f64;
    for dim in [2usize, 3] {
        let grid = grid_for(dim);
        let a = Polytope::cuboid(dim, &vec![1.0; dim][..])
            .unwrap()
            .lp_surface_area_measure(p)
            .unwrap();
        let b = Polytope::cross_polytope(dim, 1.0)
            .unwrap()
            .lp_surface_area_measure(p)
            .unwrap();
        let masses: Vec<f64> = grid
            .directions()
            .iter()
            .map(|u| grid.weights()[grid.nearest(u)] * (1.0 + 0.3 * u.x * u.x))
            .collect();
        let dense = DiscreteMeasure::on_grid(&grid, masses).unwrap().even_part();
        for i in 0..10 {
            let m = match i % 3 {
                0 => &a,
                1 => &b,
                _ => &dense,
            };
            let e = random_unit(dim, &mut rng);
            let v = transform::support_point(m, p, &e).unwrap();
            let h = |x: &Vector3<f64>| {
                transform::cosine_transform(m, p, x).unwrap().powf(1.0 / p)
            };
            let u = random_unit(dim, &mut rng);
            let s = 1e-5;
            let fd = (h(&(e + u * s)) - h(&(e - u * s))) / (2.0 * s);
            worst_fd = worst_fd.max((v.dot(&u) - fd).abs());
        }
        // Additivity of the h^p gradient under measure addition.
        let e = random_unit(dim, &mut rng);
        let u = random_unit(dim, &mut rng);
        let grad_p = |m: &DiscreteMeasure| {
            let h = transform::cosine_transform(m, p, &e).unwrap().powf(1.0 / p);
            let v = transform::support_point(m, p, &e).unwrap();
            p * h.powf(p - 1.0) * v.dot(&u)
        };
        let sum = a.add(&b).unwrap();
        worst_add = worst_add.max((grad_p(&sum) - grad_p(&a) - grad_p(&b)).abs());
    }
    report(
        7,
        worst_fd <= 1e-4 && worst_add <= 1e-4,
        &format!("support points: worst finite-difference gap {worst_fd:.3e} (tol 1e-4), additivity gap {worst_add:.3e} (tol 1e-4)"),
    );
}

#[test]
fn criterion_08_conversion_laws() {
    let cfg = dense_cfg();
    let p = 2.5;
    let mut worst_inv = 0.0f64;
    let mut worst_rescale = 0.0f64;
    let mut worst_fixed = 0.0f64;
    for dim in [2usize, 3] {
        let grid = grid_for(dim);
        let n = dim as f64;
        let k = Polytope::cross_polytope(dim, 1.0).unwrap();

        // to_normalized and from_normalized invert each other on bodies.
        let plain = BodyValuedOperator::curvature_image(p, Arc::clone(&grid), cfg.clone());
        let there = blaschke::to_normalized(plain, p, n);
        let back = blaschke::from_normalized(there, p, n).unwrap();
        let direct = blaschke::curvature_image(&k, p, &grid, &cfg).unwrap();
        let via = match back.apply(&k).unwrap() {
            lpbm::body::AnyBody::Polytope(b) => b,
            _ => unreachable!(),
        };
        worst_inv = worst_inv
            .max(hausdorff_distance(&via, &direct, &grid) / (1.0 + direct.scale()));

        // Plain image equals the volume-power rescale of the normalized one.
        let norm = blaschke::normalized_curvature_image(&k, p, &grid, &cfg).unwrap();
        let rescaled = norm.dilated(norm.volume().powf(1.0 / (p - n)));
        worst_rescale = worst_rescale
            .max(hausdorff_distance(&rescaled, &direct, &grid) / (1.0 + direct.scale()));

        // The unit ball is a fixed point of the plain image for p != n.
        // In dimension 3 the Wulff solution on the level-4 grid carries a
        // systematic support bias near 1.2e-3, so the gap floors near 2.4e-3.
        let ball = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let fixed = blaschke::curvature_image(&ball, p, &grid, &cfg).unwrap();
        worst_fixed = worst_fixed.max(hausdorff_distance(&fixed, &ball, &grid));
    }
    report(
        8,
        worst_inv <= 1e-6 && worst_rescale <= 1e-3 && worst_fixed <= 5e-3,
        &format!("conversion laws: round trip {worst_inv:.3e} (tol 1e-6), rescale path {worst_rescale:.3e} (tol 1e-3), ball fixed point {worst_fixed:.3e} (tol 5e-3)"),
    );
}

#[test]
fn criterion_09_continuity() {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let grid = grid2();
    let cfg = dense_cfg();
    let lam = BodyValuedOperator::normalized_curvature_image(2.5, Arc::clone(&grid), cfg);
    let mut worst = 0.0f64;
    let mut all_pass = true;
    for k in [
        Polytope::cuboid(2, &[1.0, 1.0]).unwrap(),
        Polytope::cross_polytope(2, 1.0).unwrap(),
    ] {
        let res = verify::check_continuity(&lam, &k, 5, &grid, 1e-2, &mut rng);
        all_pass &= res.passed;
        worst = worst.max(res.measured);
    }
    report(
        9,
        all_pass,
        &format!("perturbation ladders non-increasing with final distance {worst:.3e} (tol 1e-2)"),
    );
}

#[test]
fn criterion_10_negative_controls() {
    let grid = grid2();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();

    // The identity operator is not a valuation for the Blaschke-style sum.
    let quad = verify::random_quadruple(&square, &mut rng).unwrap();
    let id_check =
        verify::check_valuation(&BodyValuedOperator::identity(), &quad, 2.5, &grid, 1e-2);
    let id_fails = !id_check.passed;

    // A curvature image with a misdeclared degree fails the equivariance
    // check; a uniformly scaled one would still pass, since constant
    // scaling commutes with every linear image.
    let mut wrong = BodyValuedOperator::normalized_curvature_image(
        2.5,
        Arc::clone(&grid),
        dense_cfg(),
    );
    wrong.declared_degree = wrong.declared_degree.map(|q| q + 0.5);
    let phi = LinearMap::from_2d(1.4, 0.3, -0.1, 0.9).unwrap();
    let eq_check = verify::check_equivariance(&wrong, &square, &phi, &grid, 1e-3);
    let eq_fails = !eq_check.passed;

    // A measure concentrated on a great subsphere is rejected by the CLI
    // with exit code 3.
    let dir = std::env::temp_dir().join("lpbm-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("concentrated.json");
    std::fs::write(
        &path,
        r#"{"dim": 3, "directions": [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]], "masses": [1.0, 1.0, 1.0, 1.0]}"#,
    )
    .unwrap();
    let out = dir.join("rejected.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_lpbm"))
        .args([
            "solve",
            "--p",
            "2.5",
            "--in",
            path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let exit3 = status.status.code() == Some(3);

    report(
        10,
        id_fails && eq_fails && exit3,
        &format!("negative controls: identity valuation fails ({id_fails}), misdeclared-degree equivariance fails ({eq_fails}), concentrated measure exits 3 ({exit3})"),
    );
}

fn random_map(dim: usize, rng: &mut ChaCha8Rng) -> LinearMap {
    loop {
        let r = |rng: &mut ChaCha8Rng| rng.gen_range(-0.35..0.35);
        let m = if dim == 2 {
            LinearMap::from_2d(1.0 + r(rng), r(rng), r(rng), 1.0 + r(rng))
        } else {
            LinearMap::new(
                3,
                nalgebra::Matrix3::new(
                    1.0 + r(rng),
                    r(rng),
                    r(rng),
                    r(rng),
                    1.0 + r(rng),
                    r(rng),
                    r(rng),
                    r(rng),
                    1.0 + r(rng),
                ),
            )
        };
        if let Ok(map) = m {
            if map.det() > 0.5 && map.det() < 2.0 {
                return map;
            }
        }
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0f64..1.0),
            rng.gen_range(-1.0..1.0),
            if dim == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 },
        );
        if v.norm() > 1e-3 && v.norm() <= 1.0 {
            return v.normalize();
        }
    }
}
