//! Body-valued operators as first-class values: declared homogeneity
//! degrees and equivariance classes, composition with a quarter turn, and
//! conversion between plain and normalized variants.

use std::sync::Arc;

use lpbm::blaschke::{self, BodyValuedOperator, Equivariance};
use lpbm::body::{AnyBody, Polytope, Support};
use lpbm::minkowski::SolverConfig;
use lpbm::spherical::DirectionGrid;

fn main() {
    let grid = Arc::new(DirectionGrid::build(2, 360).unwrap());
    let cfg = SolverConfig {
        residual_tol: 1e-6,
        ..SolverConfig::default()
    };
    let p = 2.5;

    let ops = [
        BodyValuedOperator::normalized_curvature_image(p, Arc::clone(&grid), cfg.clone()),
        BodyValuedOperator::curvature_image(p, Arc::clone(&grid), cfg.clone()),
        BodyValuedOperator::projection_body(p, Arc::clone(&grid)),
        BodyValuedOperator::centroid_body(p, Arc::clone(&grid)),
        BodyValuedOperator::identity(),
    ];
    for op in &ops {
        println!(
            "{:<40} degree {:>8} {:?}",
            op.name,
            op.declared_degree
                .map(|q| format!("{q:.4}"))
                .unwrap_or_else(|| "-".into()),
            op.declared_equivariance
        );
    }

    // Composing with a quarter turn flips covariant and contravariant
    // behavior in the plane.
    let turned = BodyValuedOperator::projection_body(p, Arc::clone(&grid)).with_quarter_turn();
    println!(
        "quarter-turned projection body: {:?} (was {:?})",
        turned.declared_equivariance,
        Equivariance::Contravariant
    );

    // Conversion between normalizations rescales by a volume power and
    // adjusts the degree; converting there and back is the identity.
    let lam = BodyValuedOperator::normalized_curvature_image(p, Arc::clone(&grid), cfg.clone());
    let plain = blaschke::from_normalized(lam, p, 2.0).unwrap();
    println!(
        "plain image from the normalized operator: degree {:.4} (expect {:.4})",
        plain.declared_degree.unwrap(),
        (-2.0 / p - 1.0) * p / (p - 2.0)
    );
    let square = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
    let via_operator = plain.apply(&square).unwrap();
    let direct = blaschke::curvature_image(&square, p, &grid, &cfg).unwrap();
    if let AnyBody::Polytope(v) = &via_operator {
        println!(
            "operator path matches direct computation: gap {:.3e}",
            lpbm::body::hausdorff_distance(v, &direct, &grid)
        );
    }

    // Quarter-turn rotation acts on both polytopes and sampled bodies.
    let rect = Polytope::cuboid(2, &[2.0, 1.0]).unwrap();
    let rot = blaschke::rotate_quarter(&AnyBody::Polytope(rect.clone())).unwrap();
    println!(
        "rotate90 of a 2x1 box: h(e1) {:.1} -> {:.1}",
        rect.support(&nalgebra::Vector3::x()),
        rot.support(&nalgebra::Vector3::x())
    );
}
