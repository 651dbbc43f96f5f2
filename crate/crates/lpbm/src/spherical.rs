//! Discrete models of the unit sphere, spherical Lebesgue measure, and even
//! Borel measures.
//!
//! A [`DirectionGrid`] is a finite, antipodally symmetric set of unit vectors
//! with quadrature weights. In dimension 2 it is a uniform circle partition;
//! in dimension 3 it is an icosahedral subdivision closed under negation, with
//! vertex weights taken as one-third sums of incident spherical-triangle areas.
//!
//! A [`DiscreteMeasure`] carries nonnegative masses on unit directions. It is
//! the common model for surface area measures of polytopes (atoms at exact
//! facet normals), L_p-surface area measures, and Minkowski-problem data on a
//! grid. Evenness is enforced by construction: masses are stored over the full
//! direction set with an explicit antipode pairing, so mirrored masses are
//! bit-identical rather than merely close.

use std::collections::HashMap;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{LpbmError, Result};

const MIN_RESOLUTION: usize = 8;

/// Relative concentration threshold below which a measure counts as
/// concentrated on a great subsphere and is refused by the solver.
pub const CONCENTRATION_THRESHOLD: f64 = 1e-8;

/// Antipodally symmetric unit directions with quadrature weights for the
/// spherical Lebesgue measure.
#[derive(Debug, Clone)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<Vector3<f64>>,
    weights: Vec<f64>,
    antipode_index: Vec<usize>,
}

impl DirectionGrid {
    /// Builds a grid for `dim` in {2, 3}.
    ///
    /// Dimension 2: `resolution` equally spaced angles (resolution must be
    /// >= 8 and divisible by 4 so that the quarter-turn is an exact index
    /// permutation), each carrying weight 2π/resolution.
    ///
    /// Dimension 3: the smallest icosahedral subdivision with at least
    /// `resolution` vertices (vertex counts are 12, 42, 162, 642, 2562, ...).
    pub fn build(dim: usize, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(LpbmError::ResolutionTooSmall(resolution, MIN_RESOLUTION));
        }
        match dim {
            2 => {
                if resolution % 4 != 0 {
                    return Err(LpbmError::ResolutionNotDivisible(resolution));
                }
                Ok(Self::circle(resolution))
            }
            3 => Ok(Self::icosphere_with_min_vertices(resolution)),
            d => Err(LpbmError::UnsupportedDim(d)),
        }
    }

    fn circle(resolution: usize) -> Self {
        let half = resolution / 2;
        let mut directions = Vec::with_capacity(resolution);
        for k in 0..half {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
            directions.push(Vector3::new(theta.cos(), theta.sin(), 0.0));
        }
        // Second half is the exact negation of the first so the antipode
        // relation holds bit-for-bit.
        for k in 0..half {
            directions.push(-directions[k]);
        }
        let weight = 2.0 * std::f64::consts::PI / resolution as f64;
        let antipode_index = (0..resolution).map(|k| (k + half) % resolution).collect();
        DirectionGrid {
            dim: 2,
            directions,
            weights: vec![weight; resolution],
            antipode_index,
        }
    }

    fn icosphere_with_min_vertices(min_vertices: usize) -> Self {
        let mut level = 0usize;
        while 10 * 4usize.pow(level as u32) + 2 < min_vertices {
            level += 1;
        }
        Self::icosphere(level)
    }

    /// Icosahedral subdivision grid at the given subdivision level.
    pub fn icosphere(level: usize) -> Self {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let raw = [
            (-1.0, phi, 0.0),
            (1.0, phi, 0.0),
            (-1.0, -phi, 0.0),
            (1.0, -phi, 0.0),
            (0.0, -1.0, phi),
            (0.0, 1.0, phi),
            (0.0, -1.0, -phi),
            (0.0, 1.0, -phi),
            (phi, 0.0, -1.0),
            (phi, 0.0, 1.0),
            (-phi, 0.0, -1.0),
            (-phi, 0.0, 1.0),
        ];
        let mut vertices: Vec<Vector3<f64>> = raw
            .iter()
            .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
            .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];

        for _ in 0..level {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next_faces = Vec::with_capacity(faces.len() * 4);
            for &[a, b, c] in &faces {
                let ab = midpoint_index(&mut vertices, &mut midpoint, a, b);
                let bc = midpoint_index(&mut vertices, &mut midpoint, b, c);
                let ca = midpoint_index(&mut vertices, &mut midpoint, c, a);
                next_faces.push([a, ab, ca]);
                next_faces.push([b, bc, ab]);
                next_faces.push([c, ca, bc]);
                next_faces.push([ab, bc, ca]);
            }
            faces = next_faces;
        }

        // Negating both endpoints of an edge negates the (un-normalized)
        // midpoint exactly, so every vertex has a bit-exact antipode.
        let index_of: HashMap<[u64; 3], usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (bits(v), i))
            .collect();
        let antipode_index: Vec<usize> = vertices
            .iter()
            .map(|v| {
                *index_of
                    .get(&bits(&(-v)))
                    .expect("icosphere vertex missing its antipode")
            })
            .collect();

        let mut weights = vec![0.0; vertices.len()];
        for &[a, b, c] in &faces {
            let area = spherical_triangle_area(&vertices[a], &vertices[b], &vertices[c]);
            weights[a] += area / 3.0;
            weights[b] += area / 3.0;
            weights[c] += area / 3.0;
        }
        // Antipodal triangle areas agree to the last ulp only; force the pair
        // weights exactly equal.
        for i in 0..weights.len() {
            let j = antipode_index[i];
            if i < j {
                let w = 0.5 * (weights[i] + weights[j]);
                weights[i] = w;
                weights[j] = w;
            }
        }

        DirectionGrid {
            dim: 3,
            directions: vertices,
            weights,
            antipode_index,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vector3<f64>] {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> Vector3<f64> {
        self.directions[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn antipode_index(&self) -> &[usize] {
        &self.antipode_index
    }

    pub fn antipode(&self, i: usize) -> usize {
        self.antipode_index[i]
    }

    /// Index of the grid direction closest to `u`.
    pub fn nearest(&self, u: &Vector3<f64>) -> usize {
        let mut best = 0;
        let mut best_dot = f64::NEG_INFINITY;
        for (i, d) in self.directions.iter().enumerate() {
            let dot = d.dot(u);
            if dot > best_dot {
                best_dot = dot;
                best = i;
            }
        }
        best
    }

    /// Quadrature of a function over the sphere against spherical Lebesgue
    /// measure.
    pub fn integrate<F: Fn(&Vector3<f64>) -> f64>(&self, f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| f(u) * w)
            .sum()
    }
}

fn bits(v: &Vector3<f64>) -> [u64; 3] {
    // Adding +0.0 maps -0.0 to +0.0 so both zero signs share one key.
    [
        (v.x + 0.0).to_bits(),
        (v.y + 0.0).to_bits(),
        (v.z + 0.0).to_bits(),
    ]
}

fn midpoint_index(
    vertices: &mut Vec<Vector3<f64>>,
    cache: &mut HashMap<(usize, usize), usize>,
    i: usize,
    j: usize,
) -> usize {
    let key = (i.min(j), i.max(j));
    if let Some(&k) = cache.get(&key) {
        return k;
    }
    let m = (vertices[i] + vertices[j]).normalize();
    vertices.push(m);
    let k = vertices.len() - 1;
    cache.insert(key, k);
    k
}

/// Area of the spherical triangle with unit vertices a, b, c
/// (Van Oosterom-Strackee).
fn spherical_triangle_area(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Nonnegative masses on antipodally paired unit directions.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    dim: usize,
    directions: Vec<Vector3<f64>>,
    masses: Vec<f64>,
    antipode_index: Vec<usize>,
    even: bool,
}

impl DiscreteMeasure {
    /// Measure living on a grid's direction set.
    pub fn on_grid(grid: &DirectionGrid, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != grid.len() {
            return Err(LpbmError::Invalid(format!(
                "mass count {} does not match grid size {}",
                masses.len(),
                grid.len()
            )));
        }
        if masses.iter().any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(LpbmError::Invalid("masses must be finite and nonnegative".into()));
        }
        let antipode_index = grid.antipode_index().to_vec();
        let even = masses
            .iter()
            .enumerate()
            .all(|(i, &m)| m == masses[antipode_index[i]]);
        Ok(DiscreteMeasure {
            dim: grid.dim(),
            directions: grid.directions().to_vec(),
            masses,
            antipode_index,
            even,
        })
    }

    /// Uniform density 1 against the grid's quadrature weights, i.e. the
    /// discrete model of spherical Lebesgue measure.
    pub fn lebesgue(grid: &DirectionGrid) -> Self {
        Self::on_grid(grid, grid.weights().to_vec()).expect("grid weights are valid masses")
    }

    /// Atomic measure at explicit unit directions.
    ///
    /// Directions closer than the angular merge tolerance 1e-9 are merged
    /// (their masses added); missing antipodes are inserted with mass zero so
    /// the pairing is total.
    pub fn from_atoms(dim: usize, atoms: &[(Vector3<f64>, f64)]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(LpbmError::UnsupportedDim(dim));
        }
        let mut directions: Vec<Vector3<f64>> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        let merge_tol = 1e-9;
        let place = |u: Vector3<f64>, m: f64, dirs: &mut Vec<Vector3<f64>>, ms: &mut Vec<f64>| {
            let n = u.norm();
            if n <= 0.0 {
                return Err(LpbmError::Invalid("zero atom direction".into()));
            }
            let u = u / n;
            for (i, d) in dirs.iter().enumerate() {
                if (d - u).norm() <= merge_tol {
                    ms[i] += m;
                    return Ok(());
                }
            }
            dirs.push(u);
            ms.push(m);
            Ok(())
        };
        for &(u, m) in atoms {
            if m < 0.0 || !m.is_finite() {
                return Err(LpbmError::Invalid("masses must be finite and nonnegative".into()));
            }
            place(u, m, &mut directions, &mut masses)?;
        }
        // Antipodal closure: pair each direction with its exact negation.
        let mut antipode_index = vec![usize::MAX; directions.len()];
        let mut i = 0;
        while i < directions.len() {
            if antipode_index[i] == usize::MAX {
                let neg = -directions[i];
                let mut found = None;
                for (j, d) in directions.iter().enumerate() {
                    if j != i && (d - neg).norm() <= merge_tol {
                        found = Some(j);
                        break;
                    }
                }
                match found {
                    Some(j) => {
                        // Store the negation bit-exactly.
                        directions[j] = neg;
                        antipode_index[i] = j;
                        antipode_index[j] = i;
                    }
                    None => {
                        directions.push(neg);
                        masses.push(0.0);
                        antipode_index.push(i);
                        antipode_index[i] = directions.len() - 1;
                    }
                }
            }
            i += 1;
        }
        let even = masses
            .iter()
            .enumerate()
            .all(|(i, &m)| m == masses[antipode_index[i]]);
        Ok(DiscreteMeasure {
            dim,
            directions,
            masses,
            antipode_index,
            even,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vector3<f64>] {
        &self.directions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn antipode_index(&self) -> &[usize] {
        &self.antipode_index
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Even part: masses'[i] = (masses[i] + masses[antipode(i)]) / 2.
    ///
    /// Total mass is preserved and the output satisfies the even invariant
    /// bit-exactly.
    pub fn even_part(&self) -> DiscreteMeasure {
        let masses: Vec<f64> = (0..self.masses.len())
            .map(|i| 0.5 * (self.masses[i] + self.masses[self.antipode_index[i]]))
            .collect();
        DiscreteMeasure {
            dim: self.dim,
            directions: self.directions.clone(),
            masses,
            antipode_index: self.antipode_index.clone(),
            even: true,
        }
    }

    /// Smallest eigenvalue of the mass-normalized second-moment matrix
    /// (1/|m|) Σ m_i u_i ⊗ u_i. Zero iff the support lies in a proper
    /// subspace (up to numerical rank).
    pub fn concentration_gap(&self) -> Result<f64> {
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(LpbmError::ZeroTotalMass);
        }
        if self.dim == 2 {
            let mut m = Matrix2::zeros();
            for (u, &w) in self.directions.iter().zip(&self.masses) {
                let v = nalgebra::Vector2::new(u.x, u.y);
                m += (w / total) * v * v.transpose();
            }
            let eig = m.symmetric_eigenvalues();
            Ok(eig.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0))
        } else {
            let mut m = Matrix3::zeros();
            for (u, &w) in self.directions.iter().zip(&self.masses) {
                m += (w / total) * u * u.transpose();
            }
            let eig = m.symmetric_eigenvalues();
            Ok(eig.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0))
        }
    }

    /// Checks the admissibility preconditions for Minkowski-problem inputs:
    /// even, strictly positive total mass, not concentrated on a great
    /// subsphere.
    pub fn check_minkowski_data(&self) -> Result<()> {
        if !self.even {
            return Err(LpbmError::NotEven);
        }
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(LpbmError::ZeroTotalMass);
        }
        let gap = self.concentration_gap()?;
        let threshold = CONCENTRATION_THRESHOLD;
        if gap < threshold {
            return Err(LpbmError::Concentrated { gap, threshold });
        }
        Ok(())
    }

    /// Pointwise sum of two measures over the merged direction set.
    pub fn add(&self, other: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        if self.dim != other.dim {
            return Err(LpbmError::Invalid("dimension mismatch in measure sum".into()));
        }
        let atoms: Vec<(Vector3<f64>, f64)> = self
            .directions
            .iter()
            .zip(&self.masses)
            .chain(other.directions.iter().zip(&other.masses))
            .map(|(u, &m)| (*u, m))
            .collect();
        DiscreteMeasure::from_atoms(self.dim, &atoms)
    }

    /// Same measure with all masses multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> DiscreteMeasure {
        let mut out = self.clone();
        for m in &mut out.masses {
            *m *= factor;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_grid_invariants() {
        let g = DirectionGrid::build(2, 360).unwrap();
        assert_eq!(g.len(), 360);
        for (i, d) in g.directions().iter().enumerate() {
            assert!((d.norm() - 1.0).abs() < 1e-12);
            let a = g.antipode(i);
            assert_ne!(a, i);
            assert_eq!(g.antipode(a), i);
            assert_eq!(g.direction(a), -d);
            assert_eq!(g.weights()[i], g.weights()[a]);
        }
        let total: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, 2.0 * std::f64::consts::PI, max_relative = 1e-9);
    }

    #[test]
    fn tiny_circle_grid_matches_uniform_partition() {
        // Resolution 4 is below the public minimum; exercise the raw builder.
        let g = DirectionGrid::circle(4);
        assert_eq!(g.len(), 4);
        for w in g.weights() {
            assert_relative_eq!(*w, std::f64::consts::FRAC_PI_2, max_relative = 1e-15);
        }
        assert_eq!(g.direction(0), Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(g.direction(2), Vector3::new(-1.0, -0.0, -0.0));
    }

    #[test]
    fn icosphere_invariants_and_weight_sum() {
        for level in [0, 1, 2] {
            let g = DirectionGrid::icosphere(level);
            assert_eq!(g.len(), 10 * 4usize.pow(level as u32) + 2);
            for (i, d) in g.directions().iter().enumerate() {
                assert!((d.norm() - 1.0).abs() < 1e-12);
                let a = g.antipode(i);
                assert_ne!(a, i);
                assert_eq!(g.antipode(a), i);
                assert_eq!(g.direction(a), -d);
                assert_eq!(g.weights()[i], g.weights()[a]);
            }
            let total: f64 = g.weights().iter().sum();
            assert_relative_eq!(total, 4.0 * std::f64::consts::PI, max_relative = 1e-9);
        }
    }

    #[test]
    fn icosphere_resolution_selection() {
        let g = DirectionGrid::build(3, 2562).unwrap();
        assert_eq!(g.len(), 2562);
        let g = DirectionGrid::build(3, 100).unwrap();
        assert_eq!(g.len(), 162);
    }

    #[test]
    fn quadrature_second_moment() {
        let g = DirectionGrid::build(3, 2562).unwrap();
        let e = Vector3::new(0.3, -0.7, 0.64).normalize();
        let val = g.integrate(|u| u.dot(&e).powi(2));
        assert_relative_eq!(val, 4.0 * std::f64::consts::PI / 3.0, max_relative = 1e-3);
    }

    #[test]
    fn build_grid_rejections() {
        assert!(DirectionGrid::build(4, 100).is_err());
        assert!(DirectionGrid::build(2, 4).is_err());
        assert!(DirectionGrid::build(2, 10).is_err());
    }

    #[test]
    fn even_part_examples() {
        let g = DirectionGrid::build(2, 8).unwrap();
        // Mass 2 at e1, 0 elsewhere.
        let mut masses = vec![0.0; 8];
        masses[0] = 2.0;
        let m = DiscreteMeasure::on_grid(&g, masses).unwrap();
        assert!(!m.is_even());
        let e = m.even_part();
        assert!(e.is_even());
        assert_eq!(e.masses()[0], 1.0);
        assert_eq!(e.masses()[g.antipode(0)], 1.0);
        assert_eq!(e.total_mass(), m.total_mass());
        // Idempotence on an even input.
        let ee = e.even_part();
        assert_eq!(ee.masses(), e.masses());
    }

    #[test]
    fn concentration_gap_examples() {
        let g = DirectionGrid::build(2, 360).unwrap();
        let uniform = DiscreteMeasure::lebesgue(&g);
        assert_relative_eq!(uniform.concentration_gap().unwrap(), 0.5, max_relative = 1e-6);

        // All mass on +-e1: rank one support.
        let mut masses = vec![0.0; 360];
        masses[0] = 1.0;
        masses[180] = 1.0;
        let m = DiscreteMeasure::on_grid(&g, masses).unwrap();
        assert!(m.concentration_gap().unwrap() < 1e-12);

        // Unit masses at +-e1, +-e2.
        let mut masses = vec![0.0; 360];
        for k in [0, 90, 180, 270] {
            masses[k] = 1.0;
        }
        let m = DiscreteMeasure::on_grid(&g, masses).unwrap();
        assert_relative_eq!(m.concentration_gap().unwrap(), 0.5, max_relative = 1e-9);
    }

    #[test]
    fn concentration_gap_rotation_invariant() {
        let atoms = |rot: f64| {
            let dirs: Vec<(Vector3<f64>, f64)> = (0..6)
                .map(|k| {
                    let t = rot + k as f64;
                    (Vector3::new(t.cos(), t.sin(), 0.0), 1.0 + (k % 3) as f64)
                })
                .collect();
            DiscreteMeasure::from_atoms(2, &dirs).unwrap().even_part()
        };
        let g0 = atoms(0.0).concentration_gap().unwrap();
        let g1 = atoms(0.9).concentration_gap().unwrap();
        assert_relative_eq!(g0, g1, max_relative = 1e-9);
    }

    #[test]
    fn from_atoms_merges_and_closes() {
        let e1 = Vector3::new(1.0, 0.0, 0.0);
        let m = DiscreteMeasure::from_atoms(2, &[(e1, 1.0), (e1 * 2.0, 1.0)]).unwrap();
        // Two aligned atoms merged; antipode added with mass 0.
        assert_eq!(m.len(), 2);
        assert_eq!(m.total_mass(), 2.0);
        assert!(!m.is_even());
        assert!(m.even_part().is_even());
    }

    #[test]
    fn zero_mass_rejected() {
        let g = DirectionGrid::build(2, 8).unwrap();
        let m = DiscreteMeasure::on_grid(&g, vec![0.0; 8]).unwrap();
        assert!(matches!(m.concentration_gap(), Err(LpbmError::ZeroTotalMass)));
    }
}
