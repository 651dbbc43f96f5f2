//! Exact polytope geometry and sampled-body representations.
//!
//! A [`Polytope`] keeps both representations of a full-dimensional convex
//! body: vertices and facets (unit outer normal, support offset, facet
//! measure). Facet normals are stored exactly as computed; grids enter only
//! when a surface area measure is exported onto one. A [`SampledBody`] holds
//! support-function samples on a [`DirectionGrid`](crate::spherical::DirectionGrid)
//! and is the output format of the integral transforms.

mod halfspace;
mod hull;

pub use halfspace::{halfspace_geometry, HalfspaceGeometry};
pub use hull::{convex_hull_2d, convex_hull_3d};

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{LpbmError, Result};
use crate::spherical::{DirectionGrid, DiscreteMeasure};

/// Default relative tolerance of the body-equality contract.
pub const BODY_EQ_TOL: f64 = 1e-6;

/// Anything with an exactly evaluable support function.
pub trait Support {
    fn dim(&self) -> usize;
    /// h(x) = max { x · y : y in the body }, for arbitrary x (not only unit).
    fn support(&self, x: &Vector3<f64>) -> f64;
}

/// One facet of a polytope: unit outer normal, support offset, and facet
/// measure (edge length in dim 2, area in dim 3).
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vector3<f64>,
    pub offset: f64,
    pub area: f64,
}

/// Full-dimensional convex polytope in dimension 2 or 3, held in dual
/// V-rep/H-rep form.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector3<f64>>,
    facets: Vec<Facet>,
}

impl Polytope {
    /// Convex hull of the given points (z coordinates must be 0 for dim 2).
    pub fn from_points(dim: usize, points: &[Vector3<f64>]) -> Result<Self> {
        match dim {
            2 => Self::from_points_2d(points),
            3 => Self::from_points_3d(points),
            d => Err(LpbmError::UnsupportedDim(d)),
        }
    }

    fn from_points_2d(points: &[Vector3<f64>]) -> Result<Self> {
        let hull = hull::convex_hull_2d(points)?;
        let vertices: Vec<Vector3<f64>> = hull.iter().map(|&i| points[i]).collect();
        let m = vertices.len();
        let mut facets = Vec::with_capacity(m);
        for k in 0..m {
            let a = vertices[k];
            let b = vertices[(k + 1) % m];
            let d = b - a;
            let len = d.norm();
            if len <= 0.0 {
                return Err(LpbmError::DegenerateBody);
            }
            // CCW polygon: outward normal is the edge direction rotated -90 degrees.
            let normal = Vector3::new(d.y / len, -d.x / len, 0.0);
            facets.push(Facet {
                normal,
                offset: normal.dot(&a),
                area: len,
            });
        }
        Ok(Polytope {
            dim: 2,
            vertices,
            facets,
        })
    }

    fn from_points_3d(points: &[Vector3<f64>]) -> Result<Self> {
        let tris = hull::convex_hull_3d(points)?;
        let mut used: Vec<usize> = tris.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let vertices: Vec<Vector3<f64>> = used.iter().map(|&i| points[i]).collect();
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0f64, f64::max);

        // Merge coplanar triangles into single facets.
        let mut facets: Vec<Facet> = Vec::new();
        for t in &tris {
            let (a, b, c) = (points[t[0]], points[t[1]], points[t[2]]);
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if area <= 1e-14 * scale * scale {
                continue;
            }
            let normal = cross.normalize();
            let offset = normal.dot(&a);
            match facets.iter_mut().find(|f| {
                (f.normal - normal).norm() < 1e-9 && (f.offset - offset).abs() < 1e-9 * scale.max(1.0)
            }) {
                Some(f) => f.area += area,
                None => facets.push(Facet {
                    normal,
                    offset,
                    area,
                }),
            }
        }
        if facets.len() < 4 {
            return Err(LpbmError::DegenerateBody);
        }
        Ok(Polytope {
            dim: 3,
            vertices,
            facets,
        })
    }

    /// Intersection of halfspaces { x · normal_i <= offset_i } with all
    /// offsets positive (origin interior). Redundant constraints are dropped.
    pub fn from_halfspaces(
        dim: usize,
        normals: &[Vector3<f64>],
        offsets: &[f64],
    ) -> Result<Self> {
        let geo = halfspace::halfspace_geometry(dim, normals, offsets)?;
        let facets: Vec<Facet> = normals
            .iter()
            .zip(offsets)
            .zip(&geo.areas)
            .filter(|(_, &a)| a > 0.0)
            .map(|((n, &h), &a)| Facet {
                normal: *n,
                offset: h,
                area: a,
            })
            .collect();
        if facets.len() <= dim {
            return Err(LpbmError::DegenerateBody);
        }
        Ok(Polytope {
            dim,
            vertices: geo.vertices,
            facets,
        })
    }

    /// Axis-aligned box [-a, a] x [-b, b] (x [-c, c]).
    pub fn cuboid(dim: usize, half_extents: &[f64]) -> Result<Self> {
        match dim {
            2 => {
                let (a, b) = (half_extents[0], half_extents[1]);
                Self::from_points(
                    2,
                    &[
                        Vector3::new(a, b, 0.0),
                        Vector3::new(-a, b, 0.0),
                        Vector3::new(-a, -b, 0.0),
                        Vector3::new(a, -b, 0.0),
                    ],
                )
            }
            3 => {
                let (a, b, c) = (half_extents[0], half_extents[1], half_extents[2]);
                let mut pts = Vec::new();
                for &x in &[-a, a] {
                    for &y in &[-b, b] {
                        for &z in &[-c, c] {
                            pts.push(Vector3::new(x, y, z));
                        }
                    }
                }
                Self::from_points(3, &pts)
            }
            d => Err(LpbmError::UnsupportedDim(d)),
        }
    }

    /// Cross-polytope [±r e_1, ..., ±r e_n].
    pub fn cross_polytope(dim: usize, r: f64) -> Result<Self> {
        let mut pts = vec![
            Vector3::new(r, 0.0, 0.0),
            Vector3::new(-r, 0.0, 0.0),
            Vector3::new(0.0, r, 0.0),
            Vector3::new(0.0, -r, 0.0),
        ];
        if dim == 3 {
            pts.push(Vector3::new(0.0, 0.0, r));
            pts.push(Vector3::new(0.0, 0.0, -r));
        }
        Self::from_points(dim, &pts)
    }

    /// Regular polygon / icosphere approximation of the ball of radius `r`
    /// inscribed in the grid directions (vertices on the sphere of radius r).
    pub fn ball_approximation(grid: &DirectionGrid, r: f64) -> Result<Self> {
        let pts: Vec<Vector3<f64>> = grid.directions().iter().map(|u| u * r).collect();
        Self::from_points(grid.dim(), &pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Largest vertex norm; the scale used in relative tolerances.
    pub fn scale(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0f64, f64::max)
    }

    pub fn contains_origin_interior(&self) -> bool {
        let tol = 1e-12 * self.scale().max(1.0);
        self.facets.iter().all(|f| f.offset > tol)
    }

    /// V = (1/n) Σ h_i A_i (valid for signed offsets, i.e. any origin position).
    pub fn volume(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset * f.area)
            .sum::<f64>()
            / self.dim as f64
    }

    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    /// ρ(K, u) = max { λ > 0 : λu ∈ K }; requires the origin interior.
    pub fn radial(&self, u: &Vector3<f64>) -> Result<f64> {
        if !self.contains_origin_interior() {
            return Err(LpbmError::OriginNotInterior);
        }
        let mut rho = f64::INFINITY;
        for f in &self.facets {
            let d = f.normal.dot(u);
            if d > 1e-15 {
                rho = rho.min(f.offset / d);
            }
        }
        Ok(rho)
    }

    /// Reflection through the origin.
    pub fn reflected(&self) -> Polytope {
        let pts: Vec<Vector3<f64>> = self.vertices.iter().map(|v| -v).collect();
        Polytope::from_points(self.dim, &pts).expect("reflection preserves full dimension")
    }

    pub fn is_origin_symmetric(&self, tol: f64) -> bool {
        let scale = self.scale().max(1.0);
        self.vertices.iter().all(|v| {
            self.vertices
                .iter()
                .any(|w| (w + v).norm() <= tol * scale)
        })
    }

    /// Uniform dilation by λ > 0.
    pub fn dilated(&self, lambda: f64) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v * lambda).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal,
                    offset: f.offset * lambda,
                    area: f.area * lambda.powi(self.dim as i32 - 1),
                })
                .collect(),
        }
    }

    /// Classical surface area measure S(K, ·): mass A_i at each exact facet
    /// normal.
    pub fn surface_area_measure(&self) -> DiscreteMeasure {
        let atoms: Vec<(Vector3<f64>, f64)> = self
            .facets
            .iter()
            .map(|f| (f.normal, f.area))
            .collect();
        DiscreteMeasure::from_atoms(self.dim, &atoms).expect("facet normals are valid atoms")
    }

    /// S(K, ·) with atoms snapped onto the nearest grid directions.
    pub fn surface_area_measure_snapped(&self, grid: &DirectionGrid) -> DiscreteMeasure {
        let mut masses = vec![0.0; grid.len()];
        for f in &self.facets {
            masses[grid.nearest(&f.normal)] += f.area;
        }
        DiscreteMeasure::on_grid(grid, masses).expect("snapped masses are valid")
    }

    /// L_p-surface area measure S_p(K, ·) = h^{1-p} S(K, ·); requires the
    /// origin interior and p > 1.
    pub fn lp_surface_area_measure(&self, p: f64) -> Result<DiscreteMeasure> {
        if p <= 1.0 {
            return Err(LpbmError::UnsupportedExponent(p));
        }
        if !self.contains_origin_interior() {
            return Err(LpbmError::OriginNotInterior);
        }
        let atoms: Vec<(Vector3<f64>, f64)> = self
            .facets
            .iter()
            .map(|f| (f.normal, f.offset.powf(1.0 - p) * f.area))
            .collect();
        DiscreteMeasure::from_atoms(self.dim, &atoms)
    }

    /// L_p-mixed volume V_p(K, L) = (1/n) Σ h_L(u_i)^p dS_p(K, u_i).
    pub fn mixed_volume_p(&self, other: &dyn Support, p: f64) -> Result<f64> {
        if p <= 1.0 {
            return Err(LpbmError::UnsupportedExponent(p));
        }
        if !self.contains_origin_interior() {
            return Err(LpbmError::OriginNotInterior);
        }
        let sum: f64 = self
            .facets
            .iter()
            .map(|f| other.support(&f.normal).powf(p) * f.offset.powf(1.0 - p) * f.area)
            .sum();
        Ok(sum / self.dim as f64)
    }

    /// Image under an invertible linear map; the H-rep is rebuilt from the
    /// mapped vertices.
    pub fn apply_linear(&self, map: &LinearMap) -> Result<Polytope> {
        if map.dim() != self.dim {
            return Err(LpbmError::Invalid("map/body dimension mismatch".into()));
        }
        let pts: Vec<Vector3<f64>> = self.vertices.iter().map(|v| map.apply(v)).collect();
        Polytope::from_points(self.dim, &pts)
    }

    /// Convex hull of this body with the points ±x for each given x.
    pub fn hull_with_points(&self, points: &[Vector3<f64>]) -> Result<Polytope> {
        hull_with_points(self.dim, &self.vertices, points)
    }

    /// Intersection with the halfspace { x · u <= c }, c > 0.
    pub fn cut(&self, u: &Vector3<f64>, c: f64) -> Result<Polytope> {
        if c <= 0.0 {
            return Err(LpbmError::CutOutsideBody);
        }
        if !self.contains_origin_interior() {
            return Err(LpbmError::OriginNotInterior);
        }
        let mut normals: Vec<Vector3<f64>> = self.facets.iter().map(|f| f.normal).collect();
        let mut offsets: Vec<f64> = self.facets.iter().map(|f| f.offset).collect();
        normals.push(u.normalize());
        offsets.push(c / u.norm());
        Polytope::from_halfspaces(self.dim, &normals, &offsets)
    }
}

impl Support for Polytope {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, x: &Vector3<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Convex hull of seed points together with ±x for every x in `pm_points`
/// (the paper-style [A, ±x_1, ..., ±x_m] construction).
pub fn hull_with_points(
    dim: usize,
    seed: &[Vector3<f64>],
    pm_points: &[Vector3<f64>],
) -> Result<Polytope> {
    let mut pts = seed.to_vec();
    for x in pm_points {
        pts.push(*x);
        pts.push(-*x);
    }
    Polytope::from_points(dim, &pts)
}

/// The four bodies of a slab valuation instance: K = P ∩ {x·u <= b},
/// L = P ∩ {x·u >= a}, U = K ∪ L = P, I = K ∩ L (the slab), for a < 0 < b.
pub fn valuation_quadruple(
    p: &Polytope,
    u: &Vector3<f64>,
    a: f64,
    b: f64,
) -> Result<(Polytope, Polytope, Polytope, Polytope)> {
    if !(a < 0.0 && 0.0 < b) {
        return Err(LpbmError::CutOutsideBody);
    }
    let k = p.cut(u, b)?;
    let l = p.cut(&-u, -a)?;
    let i = k.cut(&-u, -a)?;
    Ok((k, l, p.clone(), i))
}

/// Grid approximation of the Hausdorff distance max_u |h_A(u) - h_B(u)|
/// (a lower bound of the true supremum).
pub fn hausdorff_distance(a: &dyn Support, b: &dyn Support, grid: &DirectionGrid) -> f64 {
    grid.directions()
        .iter()
        .map(|u| (a.support(u) - b.support(u)).abs())
        .fold(0.0, f64::max)
}

/// Equality contract: Hausdorff distance at most tol · (1 + max support).
pub fn bodies_equal(a: &dyn Support, b: &dyn Support, grid: &DirectionGrid, tol: f64) -> bool {
    let d = hausdorff_distance(a, b, grid);
    let scale = grid
        .directions()
        .iter()
        .map(|u| a.support(u).max(b.support(u)))
        .fold(0.0, f64::max);
    d <= tol * (1.0 + scale)
}

/// Kind tag of a linear map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    General,
    /// Determinant 1 within 1e-12.
    Special,
    /// Orthogonal with positive determinant within 1e-12.
    Rotation,
}

/// An invertible n×n map (n = 2 embeds into the upper-left block).
#[derive(Debug, Clone)]
pub struct LinearMap {
    dim: usize,
    matrix: Matrix3<f64>,
    det: f64,
    kind: MapKind,
}

impl LinearMap {
    pub fn new(dim: usize, matrix: Matrix3<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(LpbmError::UnsupportedDim(dim));
        }
        let mut matrix = matrix;
        if dim == 2 {
            // Force the embedding to be exact.
            matrix.m13 = 0.0;
            matrix.m23 = 0.0;
            matrix.m31 = 0.0;
            matrix.m32 = 0.0;
            matrix.m33 = 1.0;
        }
        let det = matrix.determinant();
        if det.abs() < 1e-14 || !det.is_finite() {
            return Err(LpbmError::SingularMap);
        }
        let orth = (matrix.transpose() * matrix - Matrix3::identity()).norm();
        let kind = if orth <= 1e-12 && det > 0.0 {
            MapKind::Rotation
        } else if (det - 1.0).abs() <= 1e-12 {
            MapKind::Special
        } else {
            MapKind::General
        };
        Ok(LinearMap {
            dim,
            matrix,
            det,
            kind,
        })
    }

    pub fn from_2d(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<Self> {
        Self::new(
            2,
            Matrix3::new(m11, m12, 0.0, m21, m22, 0.0, 0.0, 0.0, 1.0),
        )
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, Matrix3::identity()).unwrap()
    }

    pub fn scaling(dim: usize, lambda: f64) -> Result<Self> {
        let mut m = Matrix3::identity() * lambda;
        if dim == 2 {
            m.m33 = 1.0;
        }
        Self::new(dim, m)
    }

    /// Planar rotation by `angle` (dim 2).
    pub fn rotation_2d(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_2d(c, -s, s, c).unwrap()
    }

    /// The quarter-turn ψ_{π/2}: (x, y) -> (-y, x).
    pub fn quarter_turn() -> Self {
        Self::from_2d(0.0, -1.0, 1.0, 0.0).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.matrix * v
    }

    pub fn inverse(&self) -> LinearMap {
        let inv = self
            .matrix
            .try_inverse()
            .expect("determinant checked at construction");
        LinearMap::new(self.dim, inv).expect("inverse of invertible map")
    }

    /// φ^{-t}, the inverse of the transpose.
    pub fn inverse_transpose(&self) -> LinearMap {
        let inv = self
            .matrix
            .transpose()
            .try_inverse()
            .expect("determinant checked at construction");
        LinearMap::new(self.dim, inv).expect("inverse transpose of invertible map")
    }

    pub fn transpose(&self) -> LinearMap {
        LinearMap::new(self.dim, self.matrix.transpose()).expect("transpose of invertible map")
    }

    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap::new(self.dim, self.matrix * other.matrix)
            .expect("composition of invertible maps")
    }

    pub fn scaled(&self, factor: f64) -> Result<LinearMap> {
        let mut m = self.matrix * factor;
        if self.dim == 2 {
            m.m33 = 1.0;
        }
        LinearMap::new(self.dim, m)
    }
}

/// Support-function samples on a direction grid, with optional radial
/// samples.
#[derive(Debug, Clone)]
pub struct SampledBody {
    grid: Arc<DirectionGrid>,
    support_values: Vec<f64>,
    radial_values: Option<Vec<f64>>,
}

impl SampledBody {
    pub fn new(grid: Arc<DirectionGrid>, support_values: Vec<f64>) -> Result<Self> {
        if support_values.len() != grid.len() {
            return Err(LpbmError::Invalid(
                "support value count does not match grid".into(),
            ));
        }
        Ok(SampledBody {
            grid,
            support_values,
            radial_values: None,
        })
    }

    pub fn from_support_fn<F: Fn(&Vector3<f64>) -> f64>(
        grid: Arc<DirectionGrid>,
        f: F,
    ) -> Self {
        let support_values = grid.directions().iter().map(|u| f(u)).collect();
        SampledBody {
            grid,
            support_values,
            radial_values: None,
        }
    }

    /// Samples both support and radial functions of a polytope.
    pub fn from_polytope(grid: Arc<DirectionGrid>, body: &Polytope) -> Result<Self> {
        let support_values: Vec<f64> =
            grid.directions().iter().map(|u| body.support(u)).collect();
        let radial_values: Result<Vec<f64>> =
            grid.directions().iter().map(|u| body.radial(u)).collect();
        Ok(SampledBody {
            grid,
            support_values,
            radial_values: Some(radial_values?),
        })
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support_values
    }

    pub fn radial_values(&self) -> Option<&[f64]> {
        self.radial_values.as_deref()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.support_values[i]
    }

    /// Mean support value; the size proxy used in homogeneity fits.
    pub fn mean_support(&self) -> f64 {
        self.support_values.iter().sum::<f64>() / self.support_values.len() as f64
    }

    /// Permutes support values by an index map: out[i] = in[perm(i)].
    pub fn permuted<F: Fn(usize) -> usize>(&self, perm: F) -> SampledBody {
        let support_values = (0..self.support_values.len())
            .map(|i| self.support_values[perm(i)])
            .collect();
        SampledBody {
            grid: Arc::clone(&self.grid),
            support_values,
            radial_values: None,
        }
    }

    pub fn scaled(&self, factor: f64) -> SampledBody {
        SampledBody {
            grid: Arc::clone(&self.grid),
            support_values: self.support_values.iter().map(|h| h * factor).collect(),
            radial_values: self
                .radial_values
                .as_ref()
                .map(|r| r.iter().map(|x| x * factor).collect()),
        }
    }
}

impl Support for SampledBody {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Nearest-grid-direction approximation, scaled by ‖x‖.
    fn support(&self, x: &Vector3<f64>) -> f64 {
        let n = x.norm();
        if n == 0.0 {
            return 0.0;
        }
        let u = x / n;
        self.support_values[self.grid.nearest(&u)] * n
    }
}

/// A convex body in either representation.
#[derive(Debug, Clone)]
pub enum AnyBody {
    Polytope(Polytope),
    Sampled(SampledBody),
}

impl AnyBody {
    pub fn scaled(&self, factor: f64) -> AnyBody {
        match self {
            AnyBody::Polytope(p) => AnyBody::Polytope(p.dilated(factor)),
            AnyBody::Sampled(s) => AnyBody::Sampled(s.scaled(factor)),
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            AnyBody::Polytope(p) => Some(p),
            AnyBody::Sampled(_) => None,
        }
    }

    /// Volume; exact for polytopes, via the circumscribed polytope of the
    /// grid samples for sampled bodies.
    pub fn volume(&self) -> Result<f64> {
        match self {
            AnyBody::Polytope(p) => Ok(p.volume()),
            AnyBody::Sampled(s) => {
                let grid = s.grid();
                let body = Polytope::from_halfspaces(
                    grid.dim(),
                    grid.directions(),
                    s.support_values(),
                )?;
                Ok(body.volume())
            }
        }
    }

    pub fn mean_support(&self, grid: &DirectionGrid) -> f64 {
        grid.directions()
            .iter()
            .map(|u| self.support(u))
            .sum::<f64>()
            / grid.len() as f64
    }
}

impl Support for AnyBody {
    fn dim(&self) -> usize {
        match self {
            AnyBody::Polytope(p) => p.dim(),
            AnyBody::Sampled(s) => s.dim(),
        }
    }

    fn support(&self, x: &Vector3<f64>) -> f64 {
        match self {
            AnyBody::Polytope(p) => p.support(x),
            AnyBody::Sampled(s) => s.support(x),
        }
    }
}
