//! Convex hulls in dimensions 2 and 3.
//!
//! The 3D hull is a quickhull with conflict lists and face adjacency. Inputs
//! are desk scale (at most a few thousand points), often in convex position
//! (dual points of a smooth body), so the conflict-list bookkeeping is what
//! keeps repeated halfspace intersections inside the solver loop affordable.

use nalgebra::Vector3;

use crate::error::{LpbmError, Result};

/// Indices of the convex hull of 2D points (z ignored), counter-clockwise.
/// Collinear points on the boundary are dropped.
pub fn convex_hull_2d(points: &[Vector3<f64>]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        (points[a].x, points[a].y)
            .partial_cmp(&(points[b].x, points[b].y))
            .unwrap()
    });
    idx.dedup_by(|&mut a, &mut b| {
        (points[a].x - points[b].x).abs() < 1e-14 && (points[a].y - points[b].y).abs() < 1e-14
    });
    if idx.len() < 3 {
        return Err(LpbmError::DegenerateBody);
    }
    let scale = idx
        .iter()
        .map(|&i| points[i].x.abs().max(points[i].y.abs()))
        .fold(0.0f64, f64::max);
    let eps = 1e-12 * scale.max(1.0) * scale.max(1.0);
    let cross = |o: usize, a: usize, b: usize| -> f64 {
        let (p, q, r) = (points[o], points[a], points[b]);
        (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    };
    let mut hull: Vec<usize> = Vec::with_capacity(idx.len() * 2);
    for &i in &idx {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(LpbmError::DegenerateBody);
    }
    Ok(hull)
}

#[derive(Debug, Clone)]
struct HullFace {
    v: [usize; 3],
    normal: Vector3<f64>,
    offset: f64,
    // neighbors[k] is the face across the directed edge (v[k], v[k+1]).
    neighbors: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
}

impl HullFace {
    fn dist(&self, p: &Vector3<f64>) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Triangulated convex hull of 3D points.
///
/// Returns outward-oriented triangles (vertex indices into `points`, normals
/// via the right-hand rule point away from the interior). Fails if the points
/// are affinely degenerate.
pub fn convex_hull_3d(points: &[Vector3<f64>]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 4 {
        return Err(LpbmError::DegenerateBody);
    }
    let scale = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(0.0f64, f64::max)
        .max(1e-30);
    let eps = 1e-10 * scale;

    let (i0, i1, i2, i3) = initial_simplex(points, eps)?;
    let centroid = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;

    let mut faces: Vec<HullFace> = Vec::new();
    for &tri in &[[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        faces.push(make_face(points, tri, &centroid));
    }
    link_all_neighbors(&mut faces);

    // Distribute the remaining points into conflict lists.
    for (pi, p) in points.iter().enumerate() {
        if pi == i0 || pi == i1 || pi == i2 || pi == i3 {
            continue;
        }
        let mut best = None;
        let mut best_d = eps;
        for (fi, f) in faces.iter().enumerate() {
            let d = f.dist(p);
            if d > best_d {
                best_d = d;
                best = Some(fi);
            }
        }
        if let Some(fi) = best {
            faces[fi].outside.push(pi);
        }
    }

    let mut pending: Vec<usize> = (0..faces.len()).collect();
    while let Some(fi) = pending.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        // Farthest conflict point of this face.
        let &apex = faces[fi]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                faces[fi]
                    .dist(&points[a])
                    .partial_cmp(&faces[fi].dist(&points[b]))
                    .unwrap()
            })
            .unwrap();
        let p = points[apex];

        // Visible faces by BFS across neighbors.
        let mut visible = vec![fi];
        let mut seen = vec![false; faces.len()];
        seen[fi] = true;
        let mut stack = vec![fi];
        while let Some(f) = stack.pop() {
            for k in 0..3 {
                let nb = faces[f].neighbors[k];
                if !seen[nb] && faces[nb].alive && faces[nb].dist(&p) > eps {
                    seen[nb] = true;
                    visible.push(nb);
                    stack.push(nb);
                }
            }
        }

        // Horizon: directed edges of visible faces whose neighbor survives.
        let mut horizon: Vec<(usize, usize, usize)> = Vec::new();
        for &f in &visible {
            for k in 0..3 {
                let nb = faces[f].neighbors[k];
                if !seen[nb] {
                    horizon.push((faces[f].v[k], faces[f].v[(k + 1) % 3], nb));
                }
            }
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
        }

        // Cone of new faces from the horizon to the apex.
        let mut new_faces: Vec<usize> = Vec::new();
        for &(a, b, nb) in &horizon {
            let ni = faces.len();
            // Horizon edges are directed in the visible face, so (a, b, apex)
            // is already outward; the vertex order must be preserved for the
            // neighbor links below.
            let mut nf = make_cone_face(points, [a, b, apex]);
            nf.neighbors[0] = nb;
            faces.push(nf);
            // Fix the surviving neighbor's link across (b, a).
            for k in 0..3 {
                if faces[nb].v[k] == b && faces[nb].v[(k + 1) % 3] == a {
                    faces[nb].neighbors[k] = ni;
                }
            }
            new_faces.push(ni);
        }
        // Link the cone faces to each other: edge (b, apex) of one matches
        // edge (apex, a') of the face whose horizon edge starts at b.
        for &ni in &new_faces {
            let b = faces[ni].v[1];
            for &nj in &new_faces {
                if faces[nj].v[0] == b {
                    faces[ni].neighbors[1] = nj;
                    faces[nj].neighbors[2] = ni;
                }
            }
        }

        // Reassign orphaned conflict points.
        for pi in orphans {
            if pi == apex {
                continue;
            }
            let q = points[pi];
            let mut best = None;
            let mut best_d = eps;
            for &ni in &new_faces {
                let d = faces[ni].dist(&q);
                if d > best_d {
                    best_d = d;
                    best = Some(ni);
                }
            }
            if let Some(ni) = best {
                faces[ni].outside.push(pi);
            }
        }
        for &ni in &new_faces {
            if !faces[ni].outside.is_empty() {
                pending.push(ni);
            }
        }
    }

    Ok(faces
        .iter()
        .filter(|f| f.alive)
        .map(|f| f.v)
        .collect())
}

fn make_face(points: &[Vector3<f64>], mut v: [usize; 3], interior: &Vector3<f64>) -> HullFace {
    let mut normal =
        (points[v[1]] - points[v[0]]).cross(&(points[v[2]] - points[v[0]]));
    let mut offset = normal.dot(&points[v[0]]);
    if normal.dot(interior) > offset {
        v.swap(1, 2);
        normal = -normal;
        offset = normal.dot(&points[v[0]]);
    }
    let n = normal.norm();
    if n > 0.0 {
        normal /= n;
        offset /= n;
    }
    HullFace {
        v,
        normal,
        offset,
        neighbors: [usize::MAX; 3],
        outside: Vec::new(),
        alive: true,
    }
}

fn make_cone_face(points: &[Vector3<f64>], v: [usize; 3]) -> HullFace {
    let mut normal = (points[v[1]] - points[v[0]]).cross(&(points[v[2]] - points[v[0]]));
    let mut offset = normal.dot(&points[v[0]]);
    let n = normal.norm();
    if n > 0.0 {
        normal /= n;
        offset /= n;
    }
    HullFace {
        v,
        normal,
        offset,
        neighbors: [usize::MAX; 3],
        outside: Vec::new(),
        alive: true,
    }
}

fn link_all_neighbors(faces: &mut [HullFace]) {
    for i in 0..faces.len() {
        for k in 0..3 {
            let (a, b) = (faces[i].v[k], faces[i].v[(k + 1) % 3]);
            let mut found = usize::MAX;
            for (j, g) in faces.iter().enumerate() {
                if j == i {
                    continue;
                }
                for m in 0..3 {
                    if g.v[m] == b && g.v[(m + 1) % 3] == a {
                        found = j;
                    }
                }
            }
            faces[i].neighbors[k] = found;
        }
    }
}

fn initial_simplex(points: &[Vector3<f64>], eps: f64) -> Result<(usize, usize, usize, usize)> {
    let i0 = 0;
    let i1 = (0..points.len())
        .max_by(|&a, &b| {
            (points[a] - points[i0])
                .norm()
                .partial_cmp(&(points[b] - points[i0]).norm())
                .unwrap()
        })
        .unwrap();
    if (points[i1] - points[i0]).norm() < eps {
        return Err(LpbmError::DegenerateBody);
    }
    let dir = (points[i1] - points[i0]).normalize();
    let line_dist = |p: &Vector3<f64>| {
        let d = p - points[i0];
        (d - dir * d.dot(&dir)).norm()
    };
    let i2 = (0..points.len())
        .max_by(|&a, &b| line_dist(&points[a]).partial_cmp(&line_dist(&points[b])).unwrap())
        .unwrap();
    if line_dist(&points[i2]) < eps {
        return Err(LpbmError::DegenerateBody);
    }
    let n = (points[i1] - points[i0])
        .cross(&(points[i2] - points[i0]))
        .normalize();
    let plane_dist = |p: &Vector3<f64>| (p - points[i0]).dot(&n).abs();
    let i3 = (0..points.len())
        .max_by(|&a, &b| plane_dist(&points[a]).partial_cmp(&plane_dist(&points[b])).unwrap())
        .unwrap();
    if plane_dist(&points[i3]) < eps {
        return Err(LpbmError::DegenerateBody);
    }
    Ok((i0, i1, i2, i3))
}
