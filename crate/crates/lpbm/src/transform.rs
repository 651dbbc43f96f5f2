//! The L_p-cosine transform and the body-valued transforms built from it:
//! projection bodies (symmetric, asymmetric, and the boundary-adapted
//! variant), centroid bodies, moment bodies, and the support-point formula.
//!
//! Every transform output is a [`SampledBody`] on a caller-supplied grid, but
//! each body also exposes an exact pointwise support evaluation (`*_support`)
//! because the defining formulas make sense at arbitrary vectors. Identity
//! checks use the pointwise forms to avoid nearest-grid interpolation error.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::Vector3;

use crate::body::{Polytope, SampledBody};
use crate::error::{LpbmError, Result};
use crate::spherical::{DirectionGrid, DiscreteMeasure};
use crate::unit_ball_volume;

/// Supported exponent range for all L_p operators.
pub const P_MIN: f64 = 1.0;
pub const P_MAX: f64 = 12.0;

/// True when p is an even integer; the cosine transform is not injective
/// there, so uniqueness-based reasoning is unavailable (forward formulas
/// still compute normally).
pub fn is_even_integer(p: f64) -> bool {
    let r = (p / 2.0).round() * 2.0;
    r >= 2.0 && (p - r).abs() < 1e-12
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p > P_MIN && p <= P_MAX && p.is_finite() {
        Ok(())
    } else {
        Err(LpbmError::UnsupportedExponent(p))
    }
}

/// C_p m(x) = Σ |x·u_i|^p m_i.
pub fn cosine_transform(m: &DiscreteMeasure, p: f64, x: &Vector3<f64>) -> Result<f64> {
    check_p(p)?;
    Ok(m.directions()
        .iter()
        .zip(m.masses())
        .map(|(u, &mass)| x.dot(u).abs().powf(p) * mass)
        .sum())
}

/// The asymmetric cosine kernel (|t| + τ t)^p at t = x·u.
fn tau_kernel(t: f64, tau: f64, p: f64) -> f64 {
    let v = t.abs() + tau * t;
    if v <= 0.0 {
        0.0
    } else {
        v.powf(p)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(LpbmError::Invalid(format!(
            "tau = {tau} outside [-1, 1]"
        )))
    }
}

/// Exact support value of the asymmetric L_p projection body at `x`:
/// h(x)^p = Σ (|x·u_i| + τ(x·u_i))^p h_i^{1-p} A_i over the facets of K.
pub fn projection_support(k: &Polytope, p: f64, tau: f64, x: &Vector3<f64>) -> Result<f64> {
    check_p(p)?;
    check_tau(tau)?;
    if !k.contains_origin_interior() {
        return Err(LpbmError::OriginNotInterior);
    }
    let sum: f64 = k
        .facets()
        .iter()
        .map(|f| tau_kernel(x.dot(&f.normal), tau, p) * f.offset.powf(1.0 - p) * f.area)
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// The asymmetric L_p projection body sampled on `grid`; τ = 0 gives the
/// symmetric L_p projection body.
pub fn projection_body(
    k: &Polytope,
    p: f64,
    tau: f64,
    grid: &Arc<DirectionGrid>,
) -> Result<SampledBody> {
    check_p(p)?;
    check_tau(tau)?;
    if !k.contains_origin_interior() {
        return Err(LpbmError::OriginNotInterior);
    }
    let values: Result<Vec<f64>> = grid
        .directions()
        .iter()
        .map(|u| projection_support(k, p, tau, u))
        .collect();
    SampledBody::new(Arc::clone(grid), values?)
}

/// Projection body of a polytope that may have the origin on its boundary:
/// facets whose affine hull contains the origin are excluded from the sum.
pub fn projection_body_boundary(
    k: &Polytope,
    p: f64,
    tau: f64,
    grid: &Arc<DirectionGrid>,
) -> Result<SampledBody> {
    check_p(p)?;
    check_tau(tau)?;
    let diam = 2.0 * k.scale();
    let cutoff = 1e-12 * diam;
    if k.facets().iter().any(|f| f.offset < -cutoff) {
        return Err(LpbmError::OriginOutside);
    }
    let contributing: Vec<_> = k
        .facets()
        .iter()
        .filter(|f| f.offset > cutoff)
        .collect();
    let values: Vec<f64> = grid
        .directions()
        .iter()
        .map(|u| {
            contributing
                .iter()
                .map(|f| tau_kernel(u.dot(&f.normal), tau, p) * f.offset.powf(1.0 - p) * f.area)
                .sum::<f64>()
                .powf(1.0 / p)
        })
        .collect();
    SampledBody::new(Arc::clone(grid), values)
}

/// The normalization constant making the L_p centroid body of the unit ball
/// the unit ball itself.
#[derive(Debug, Clone, Copy)]
pub struct CnpConstant {
    pub dim: usize,
    pub p: f64,
    pub value: f64,
}

fn cnp_cache() -> &'static Mutex<HashMap<(usize, u64, usize), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, usize), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// c_{n,p} = (1/V(B)) ∫_B |x·e|^p dx, evaluated by radial-spherical
/// quadrature on `grid`: the radial part integrates exactly to 1/(n+p), the
/// spherical part uses the grid weights. Cached per (dim, p, grid size).
pub fn calibrate_cnp(grid: &DirectionGrid, p: f64) -> Result<CnpConstant> {
    check_p(p)?;
    let dim = grid.dim();
    let key = (dim, p.to_bits(), grid.len());
    if let Some(&value) = cnp_cache().lock().unwrap().get(&key) {
        return Ok(CnpConstant { dim, p, value });
    }
    let e = Vector3::x();
    let spherical = grid.integrate(|u| u.dot(&e).abs().powf(p));
    let value = spherical / ((dim as f64 + p) * unit_ball_volume(dim));
    cnp_cache().lock().unwrap().insert(key, value);
    Ok(CnpConstant { dim, p, value })
}

/// Exact support value of the moment body M_p^τ at `u`:
/// h(u)^p = ∫_K (|u·x| + τ(u·x))^p dx.
pub fn moment_support(k: &Polytope, p: f64, tau: f64, u: &Vector3<f64>) -> Result<f64> {
    Ok(moment_integral(k, p, tau, u)?.powf(1.0 / p))
}

/// The moment integral ∫_K (|u·x| + τ(u·x))^p dx by origin-apex simplex
/// decomposition with adaptive simplex quadrature.
pub fn moment_integral(k: &Polytope, p: f64, tau: f64, u: &Vector3<f64>) -> Result<f64> {
    check_p(p)?;
    check_tau(tau)?;
    let simplices = origin_simplices(k)?;
    let rule = quadrature::rule_for(k.dim());
    let f = |x: &Vector3<f64>| tau_kernel(u.dot(x), tau, p);
    let mut total = 0.0;
    for s in &simplices {
        total += quadrature::integrate_adaptive(k.dim(), s, &f, rule, 0);
    }
    Ok(total)
}

/// The moment body M_p^τ sampled on `grid`.
pub fn moment_body(
    k: &Polytope,
    p: f64,
    tau: f64,
    grid: &Arc<DirectionGrid>,
) -> Result<SampledBody> {
    let values: Result<Vec<f64>> = grid
        .directions()
        .iter()
        .map(|u| moment_support(k, p, tau, u))
        .collect();
    SampledBody::new(Arc::clone(grid), values?)
}

/// Exact support value of the L_p centroid body at `u`:
/// h(u)^p = (1/(c_{n,p} V(K))) ∫_K |x·u|^p dx.
pub fn centroid_support(
    k: &Polytope,
    p: f64,
    grid: &DirectionGrid,
    u: &Vector3<f64>,
) -> Result<f64> {
    let c = calibrate_cnp(grid, p)?;
    let integral = moment_integral(k, p, 0.0, u)?;
    Ok((integral / (c.value * k.volume())).powf(1.0 / p))
}

/// The L_p centroid body sampled on `grid`, normalized so the centroid body
/// of the unit ball is the unit ball.
pub fn centroid_body(k: &Polytope, p: f64, grid: &Arc<DirectionGrid>) -> Result<SampledBody> {
    let c = calibrate_cnp(grid, p)?;
    let scale = (c.value * k.volume()).powf(-1.0 / p);
    let values: Result<Vec<f64>> = grid
        .directions()
        .iter()
        .map(|u| Ok(moment_integral(k, p, 0.0, u)?.powf(1.0 / p) * scale))
        .collect();
    SampledBody::new(Arc::clone(grid), values?)
}

/// The unique point of the support set in direction `e` of the body with
/// h(u) = (C_p m(u))^{1/p}: v_e = 2 (C_p m(e))^{1/p - 1} Σ_{u_i·e>0}
/// (e·u_i)^{p-1} u_i m_i.
pub fn support_point(m: &DiscreteMeasure, p: f64, e: &Vector3<f64>) -> Result<Vector3<f64>> {
    check_p(p)?;
    if !m.is_even() {
        return Err(LpbmError::NotEven);
    }
    m.check_minkowski_data()?;
    let c = cosine_transform(m, p, e)?;
    if c <= 1e-300 {
        return Err(LpbmError::ZeroTransformValue);
    }
    let mut sum = Vector3::zeros();
    for (u, &mass) in m.directions().iter().zip(m.masses()) {
        let t = e.dot(u);
        if t > 0.0 {
            sum += u * (t.powf(p - 1.0) * mass);
        }
    }
    Ok(sum * (2.0 * c.powf(1.0 / p - 1.0)))
}

/// Splits a polytope into origin-apex simplices, one per boundary triangle
/// (dim 3) or boundary edge (dim 2). Simplex lists omit the origin apex.
fn origin_simplices(k: &Polytope) -> Result<Vec<Vec<Vector3<f64>>>> {
    if !k.contains_origin_interior() {
        return Err(LpbmError::OriginNotInterior);
    }
    let scale = k.scale();
    match k.dim() {
        2 => {
            // Vertex order from construction may be arbitrary; sort by angle
            // around the interior origin.
            let mut verts = k.vertices().to_vec();
            verts.sort_by(|a, b| {
                a.y.atan2(a.x)
                    .partial_cmp(&b.y.atan2(b.x))
                    .unwrap()
            });
            let m = verts.len();
            Ok((0..m)
                .map(|i| vec![verts[i], verts[(i + 1) % m]])
                .collect())
        }
        3 => {
            let mut out = Vec::new();
            let tol = 1e-8 * scale.max(1.0);
            for f in k.facets() {
                let incident: Vec<Vector3<f64>> = k
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|v| (v.dot(&f.normal) - f.offset).abs() <= tol)
                    .collect();
                if incident.len() < 3 {
                    return Err(LpbmError::DegenerateBody);
                }
                let ordered = sort_in_plane(&f.normal, &incident);
                for i in 1..ordered.len() - 1 {
                    out.push(vec![ordered[0], ordered[i], ordered[i + 1]]);
                }
            }
            Ok(out)
        }
        d => Err(LpbmError::UnsupportedDim(d)),
    }
}

/// Orders coplanar points by angle around their centroid within the plane
/// orthogonal to `normal`.
fn sort_in_plane(normal: &Vector3<f64>, pts: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let t1 = orthogonal_unit(normal);
    let t2 = normal.cross(&t1);
    let centroid: Vector3<f64> = pts.iter().sum::<Vector3<f64>>() / pts.len() as f64;
    let mut tagged: Vec<(f64, Vector3<f64>)> = pts
        .iter()
        .map(|v| {
            let d = v - centroid;
            (d.dot(&t2).atan2(d.dot(&t1)), *v)
        })
        .collect();
    tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    tagged.into_iter().map(|(_, v)| v).collect()
}

fn orthogonal_unit(u: &Vector3<f64>) -> Vector3<f64> {
    let candidate = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Vector3::x()
    } else if u.y.abs() <= u.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    (candidate - u * u.dot(&candidate)).normalize()
}

/// Simplex quadrature: Grundmann-Moller rules (degree 7 on triangles,
/// degree 5 on tetrahedra) with adaptive midpoint subdivision, which
/// localizes the kink of |u·x| on the hyperplane u-perp.
mod quadrature {
    use nalgebra::Vector3;
    use std::sync::OnceLock;

    /// Quadrature nodes in barycentric coordinates over the apex-origin
    /// simplex (apex weight implicit); weights sum to 1 relative to the
    /// simplex measure.
    pub struct Rule {
        /// Barycentric coordinates of each node, one per simplex vertex
        /// (including the origin apex as coordinate 0).
        pub nodes: Vec<Vec<f64>>,
        pub weights: Vec<f64>,
    }

    /// Grundmann-Moller rule of index s on the d-simplex (degree 2s+1).
    pub fn grundmann_moller(d: usize, s: usize) -> Rule {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for i in 0..=s {
            let denom = d as f64 + 2.0 * (s - i) as f64 + 1.0;
            let w = (-1.0f64).powi(i as i32)
                * 2.0f64.powi(-(2 * s as i32))
                * denom.powi(2 * s as i32 + 1)
                / (factorial(i) * factorial(d + 2 * s - i + 1));
            for beta in compositions(s - i, d + 1) {
                nodes.push(beta.iter().map(|&b| (2.0 * b as f64 + 1.0) / denom).collect());
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Rule { nodes, weights }
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// All nonnegative integer vectors of length `parts` summing to `total`.
    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in compositions(total - first, parts - 1) {
                let mut v = vec![first];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }

    pub fn rule_for(dim: usize) -> &'static Rule {
        static TRI: OnceLock<Rule> = OnceLock::new();
        static TET: OnceLock<Rule> = OnceLock::new();
        match dim {
            2 => TRI.get_or_init(|| grundmann_moller(2, 3)),
            _ => TET.get_or_init(|| grundmann_moller(3, 2)),
        }
    }

    /// Measure of the origin-apex simplex over the boundary face `face`.
    fn simplex_measure(dim: usize, face: &[Vector3<f64>]) -> f64 {
        match dim {
            2 => 0.5 * (face[0].x * face[1].y - face[1].x * face[0].y).abs(),
            _ => (face[0].dot(&face[1].cross(&face[2]))).abs() / 6.0,
        }
    }

    fn apply_rule<F: Fn(&Vector3<f64>) -> f64>(
        dim: usize,
        face: &[Vector3<f64>],
        f: &F,
        rule: &Rule,
    ) -> f64 {
        let vol = simplex_measure(dim, face);
        let mut acc = 0.0;
        for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
            // Coordinate 0 multiplies the origin apex and drops out.
            let mut x = Vector3::zeros();
            for (k, v) in face.iter().enumerate() {
                x += v * node[k + 1];
            }
            acc += w * f(&x);
        }
        acc * vol
    }

    /// Children of a uniform midpoint refinement of the boundary face; each
    /// child is again an origin-apex simplex face.
    fn subdivide(dim: usize, face: &[Vector3<f64>]) -> Vec<Vec<Vector3<f64>>> {
        if dim == 2 {
            let (a, b) = (face[0], face[1]);
            let m = (a + b) * 0.5;
            vec![vec![a, m], vec![m, b]]
        } else {
            let (a, b, c) = (face[0], face[1], face[2]);
            let ab = (a + b) * 0.5;
            let bc = (b + c) * 0.5;
            let ca = (c + a) * 0.5;
            vec![
                vec![a, ab, ca],
                vec![ab, b, bc],
                vec![ca, bc, c],
                vec![ab, bc, ca],
            ]
        }
    }

    const MAX_DEPTH: usize = 5;
    const REL_TOL: f64 = 1e-6;

    pub fn integrate_adaptive<F: Fn(&Vector3<f64>) -> f64>(
        dim: usize,
        face: &[Vector3<f64>],
        f: &F,
        rule: &Rule,
        depth: usize,
    ) -> f64 {
        let coarse = apply_rule(dim, face, f, rule);
        let children = subdivide(dim, face);
        let fine: f64 = children
            .iter()
            .map(|c| apply_rule(dim, c, f, rule))
            .sum();
        if depth >= MAX_DEPTH || (coarse - fine).abs() <= REL_TOL * (fine.abs() + 1e-12) {
            return fine;
        }
        children
            .iter()
            .map(|c| integrate_adaptive(dim, c, f, rule, depth + 1))
            .sum()
    }
}
