//! Halfspace intersection via polarity.
//!
//! For unit outer normals u_i and support numbers h_i > 0 (origin interior),
//! the body ∩ {x · u_i <= h_i} is recovered from the convex hull of the dual
//! points u_i / h_i: facets of the dual hull correspond to primal vertices,
//! dual hull vertices to primal facets. This is the geometry kernel the
//! Minkowski solver evaluates at every iterate, so it reports facet areas per
//! input normal (zero when the facet has dropped out of the boundary).

use nalgebra::{Matrix2, Vector2, Vector3};

use super::hull::{convex_hull_2d, convex_hull_3d};
use crate::error::{LpbmError, Result};

/// Result of intersecting halfspaces with the origin interior.
#[derive(Debug, Clone)]
pub struct HalfspaceGeometry {
    /// Deduplicated vertices of the intersection body.
    pub vertices: Vec<Vector3<f64>>,
    /// Facet measure (edge length in dim 2, facet area in dim 3) per input
    /// normal; zero when the constraint is redundant.
    pub areas: Vec<f64>,
    /// Volume, computed as (1/n) Σ h_i A_i.
    pub volume: f64,
}

pub fn halfspace_geometry(
    dim: usize,
    normals: &[Vector3<f64>],
    offsets: &[f64],
) -> Result<HalfspaceGeometry> {
    if normals.len() != offsets.len() {
        return Err(LpbmError::Invalid("normal/offset count mismatch".into()));
    }
    if offsets.iter().any(|&h| h <= 0.0 || !h.is_finite()) {
        return Err(LpbmError::OriginNotInterior);
    }
    match dim {
        2 => halfspace_geometry_2d(normals, offsets),
        3 => halfspace_geometry_3d(normals, offsets),
        d => Err(LpbmError::UnsupportedDim(d)),
    }
}

fn halfspace_geometry_2d(
    normals: &[Vector3<f64>],
    offsets: &[f64],
) -> Result<HalfspaceGeometry> {
    let dual: Vec<Vector3<f64>> = normals
        .iter()
        .zip(offsets)
        .map(|(u, &h)| u / h)
        .collect();
    let hull = convex_hull_2d(&dual)?;
    let m = hull.len();
    // Primal vertex for each dual hull edge (hull[k], hull[k+1]).
    let mut edge_vertices = Vec::with_capacity(m);
    for k in 0..m {
        let i = hull[k];
        let j = hull[(k + 1) % m];
        let a = Matrix2::new(normals[i].x, normals[i].y, normals[j].x, normals[j].y);
        let rhs = Vector2::new(offsets[i], offsets[j]);
        let x = a
            .lu()
            .solve(&rhs)
            .ok_or(LpbmError::DegenerateBody)?;
        edge_vertices.push(Vector3::new(x.x, x.y, 0.0));
    }
    let mut areas = vec![0.0; normals.len()];
    for k in 0..m {
        let prev = edge_vertices[(k + m - 1) % m];
        let next = edge_vertices[k];
        areas[hull[k]] = (next - prev).norm();
    }
    let volume = 0.5
        * areas
            .iter()
            .zip(offsets)
            .map(|(&a, &h)| a * h)
            .sum::<f64>();
    if volume <= 0.0 {
        return Err(LpbmError::DegenerateBody);
    }
    Ok(HalfspaceGeometry {
        vertices: dedupe(edge_vertices),
        areas,
        volume,
    })
}

fn halfspace_geometry_3d(
    normals: &[Vector3<f64>],
    offsets: &[f64],
) -> Result<HalfspaceGeometry> {
    let dual: Vec<Vector3<f64>> = normals
        .iter()
        .zip(offsets)
        .map(|(u, &h)| u / h)
        .collect();
    let tris = convex_hull_3d(&dual)?;
    // Primal vertex per dual facet: the plane {y : y · x = 1} through the
    // three dual points has x = n / d.
    let mut incident: Vec<Vec<Vector3<f64>>> = vec![Vec::new(); normals.len()];
    let mut all_vertices = Vec::with_capacity(tris.len());
    for t in &tris {
        let (a, b, c) = (dual[t[0]], dual[t[1]], dual[t[2]]);
        let n = (b - a).cross(&(c - a));
        let d = n.dot(&a);
        if d <= 0.0 {
            return Err(LpbmError::DegenerateBody);
        }
        let x = n / d;
        all_vertices.push(x);
        for &i in t {
            incident[i].push(x);
        }
    }
    let mut areas = vec![0.0; normals.len()];
    for (i, verts) in incident.iter().enumerate() {
        if verts.len() < 3 {
            continue;
        }
        areas[i] = planar_polygon_area(&normals[i], verts);
    }
    let volume = areas
        .iter()
        .zip(offsets)
        .map(|(&a, &h)| a * h)
        .sum::<f64>()
        / 3.0;
    if volume <= 0.0 {
        return Err(LpbmError::DegenerateBody);
    }
    Ok(HalfspaceGeometry {
        vertices: dedupe(all_vertices),
        areas,
        volume,
    })
}

/// Area of the planar polygon with the given (unordered) vertices lying in a
/// plane orthogonal to `normal`; vertices are sorted by angle around their
/// centroid first.
fn planar_polygon_area(normal: &Vector3<f64>, verts: &[Vector3<f64>]) -> f64 {
    let t1 = orthogonal_unit(normal);
    let t2 = normal.cross(&t1);
    let centroid: Vector3<f64> = verts.iter().sum::<Vector3<f64>>() / verts.len() as f64;
    let mut planar: Vec<(f64, f64, f64)> = verts
        .iter()
        .map(|v| {
            let d = v - centroid;
            let (x, y) = (d.dot(&t1), d.dot(&t2));
            (y.atan2(x), x, y)
        })
        .collect();
    planar.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let m = planar.len();
    let mut twice_area = 0.0;
    for k in 0..m {
        let (_, x1, y1) = planar[k];
        let (_, x2, y2) = planar[(k + 1) % m];
        twice_area += x1 * y2 - x2 * y1;
    }
    0.5 * twice_area.abs()
}

pub(crate) fn orthogonal_unit(u: &Vector3<f64>) -> Vector3<f64> {
    let candidate = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Vector3::x()
    } else if u.y.abs() <= u.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    (candidate - u * u.dot(&candidate)).normalize()
}

fn dedupe(mut verts: Vec<Vector3<f64>>) -> Vec<Vector3<f64>> {
    let scale = verts
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max)
        .max(1e-30);
    let tol = 1e-9 * scale;
    let mut out: Vec<Vector3<f64>> = Vec::with_capacity(verts.len());
    for v in verts.drain(..) {
        if !out.iter().any(|w| (w - v).norm() <= tol) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_from_halfspaces() {
        let normals = vec![
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, -1.0, 0.0),
        ];
        let g = halfspace_geometry(2, &normals, &[1.0; 4]).unwrap();
        assert_eq!(g.vertices.len(), 4);
        assert_relative_eq!(g.volume, 4.0, max_relative = 1e-12);
        for a in &g.areas {
            assert_relative_eq!(*a, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn redundant_halfspace_gets_zero_area() {
        let normals = vec![
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, -1.0, 0.0),
            Vector3::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let g = halfspace_geometry(2, &normals, &[1.0, 1.0, 1.0, 1.0, 5.0]).unwrap();
        assert_eq!(g.areas[4], 0.0);
        assert_relative_eq!(g.volume, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn cube_from_halfspaces() {
        let normals = vec![
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, -1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(0.0, 0.0, -1.0),
        ];
        let g = halfspace_geometry(3, &normals, &[1.0; 6]).unwrap();
        assert_eq!(g.vertices.len(), 8);
        assert_relative_eq!(g.volume, 8.0, max_relative = 1e-9);
        for a in &g.areas {
            assert_relative_eq!(*a, 4.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn ball_like_intersection_matches_sphere() {
        let grid = crate::spherical::DirectionGrid::icosphere(2);
        let normals = grid.directions().to_vec();
        let offsets = vec![1.0; normals.len()];
        let g = halfspace_geometry(3, &normals, &offsets).unwrap();
        // Circumscribed polytope of the unit ball: volume slightly above kappa_3.
        let kappa3 = 4.0 * std::f64::consts::PI / 3.0;
        assert!(g.volume > kappa3);
        assert!(g.volume < kappa3 * 1.05);
    }

    #[test]
    fn nonpositive_offset_rejected() {
        let normals = vec![Vector3::x(), -Vector3::x(), Vector3::y(), -Vector3::y()];
        assert!(halfspace_geometry(2, &normals, &[1.0, -1.0, 1.0, 1.0]).is_err());
    }
}
