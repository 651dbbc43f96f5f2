//! The Blaschke-level algebra: L_p-Blaschke sums and symmetric
//! L_p-curvature images in plain and volume-normalized form, the conversions
//! between the two normalizations, and the planar quarter turn.
//!
//! Every operation here reduces to the Minkowski solver: Blaschke sums add
//! the summands' (normalized) L_p-surface area measures and solve; curvature
//! images solve for the body whose normalized measure is the even
//! radial-power density ½ρ_K^{n+p} + ½ρ_{-K}^{n+p} sampled on a quadrature
//! grid. The [`BodyValuedOperator`] wrapper packages an operator with its
//! declared homogeneity degree and equivariance so the verification suites
//! can predict images under linear maps.

use std::sync::Arc;


use crate::body::{AnyBody, LinearMap, Polytope, Support};
use crate::error::{LpbmError, Result};
use crate::minkowski::{solve_even, solve_normalized_even, SolverConfig};
use crate::spherical::{DirectionGrid, DiscreteMeasure};
use crate::transform::check_p;

/// Equivariance class of a body-valued operator under linear maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equivariance {
    /// Z(φK) = (det φ)^{(q-1)/n} φ ZK for degree q.
    Covariant,
    /// Z(φK) = (det φ)^{(q+1)/n} φ^{-t} ZK for degree q.
    Contravariant,
    None,
}

/// A named body-valued operator together with its declared homogeneity
/// degree and equivariance, the interface the verification suites consume.
pub struct BodyValuedOperator {
    pub name: String,
    pub declared_degree: Option<f64>,
    pub declared_equivariance: Equivariance,
    apply: Box<dyn Fn(&Polytope) -> Result<AnyBody> + Send + Sync>,
}

impl BodyValuedOperator {
    pub fn new<F>(
        name: impl Into<String>,
        declared_degree: Option<f64>,
        declared_equivariance: Equivariance,
        apply: F,
    ) -> Self
    where
        F: Fn(&Polytope) -> Result<AnyBody> + Send + Sync + 'static,
    {
        BodyValuedOperator {
            name: name.into(),
            declared_degree,
            declared_equivariance,
            apply: Box::new(apply),
        }
    }

    pub fn apply(&self, k: &Polytope) -> Result<AnyBody> {
        (self.apply)(k)
    }

    /// The identity operator; degree 1, covariant. Not a Blaschke valuation,
    /// which makes it the negative control for valuation checks.
    pub fn identity() -> Self {
        Self::new("identity", Some(1.0), Equivariance::Covariant, |k| {
            Ok(AnyBody::Polytope(k.clone()))
        })
    }

    /// The normalized symmetric L_p-curvature image Λ̃; degree -n/p - 1,
    /// contravariant.
    pub fn normalized_curvature_image(
        p: f64,
        grid: Arc<DirectionGrid>,
        cfg: SolverConfig,
    ) -> Self {
        let n = grid.dim() as f64;
        Self::new(
            format!("normalized-curvature-image(p={p})"),
            Some(-n / p - 1.0),
            Equivariance::Contravariant,
            move |k| Ok(AnyBody::Polytope(normalized_curvature_image(k, p, &grid, &cfg)?)),
        )
    }

    /// The plain symmetric L_p-curvature image Λ; degree
    /// (-n/p - 1)·p/(p - n), contravariant; p ≠ n.
    pub fn curvature_image(p: f64, grid: Arc<DirectionGrid>, cfg: SolverConfig) -> Self {
        let n = grid.dim() as f64;
        Self::new(
            format!("curvature-image(p={p})"),
            Some((-n / p - 1.0) * p / (p - n)),
            Equivariance::Contravariant,
            move |k| Ok(AnyBody::Polytope(curvature_image(k, p, &grid, &cfg)?)),
        )
    }

    /// The L_p projection body as an operator; degree (n-p)/p,
    /// contravariant.
    pub fn projection_body(p: f64, grid: Arc<DirectionGrid>) -> Self {
        let n = grid.dim() as f64;
        Self::new(
            format!("projection-body(p={p})"),
            Some((n - p) / p),
            Equivariance::Contravariant,
            move |k| {
                Ok(AnyBody::Sampled(crate::transform::projection_body(
                    k, p, 0.0, &grid,
                )?))
            },
        )
    }

    /// The L_p centroid body as an operator; degree 1, covariant.
    pub fn centroid_body(p: f64, grid: Arc<DirectionGrid>) -> Self {
        Self::new(
            format!("centroid-body(p={p})"),
            Some(1.0),
            Equivariance::Covariant,
            move |k| {
                Ok(AnyBody::Sampled(crate::transform::centroid_body(
                    k, p, &grid,
                )?))
            },
        )
    }

    /// Post-composes with the planar quarter turn, converting a
    /// contravariant planar operator into a covariant one of the same
    /// degree.
    pub fn with_quarter_turn(self) -> Self {
        let equivariance = match self.declared_equivariance {
            Equivariance::Contravariant => Equivariance::Covariant,
            Equivariance::Covariant => Equivariance::Contravariant,
            Equivariance::None => Equivariance::None,
        };
        Self::new(
            format!("quarter-turn({})", self.name),
            self.declared_degree,
            equivariance,
            move |k| rotate_quarter(&self.apply(k)?),
        )
    }

    /// Post-scales outputs by a constant factor; used as the deliberately
    /// mis-scaled negative control in equivariance checks.
    pub fn scaled_by(self, factor: f64) -> Self {
        Self::new(
            format!("scaled({}, {factor})", self.name),
            self.declared_degree,
            self.declared_equivariance,
            move |k| Ok(self.apply(k)?.scaled(factor)),
        )
    }
}

fn require_symmetric(k: &Polytope) -> Result<()> {
    if k.is_origin_symmetric(1e-9) {
        Ok(())
    } else {
        Err(LpbmError::NotOriginSymmetric)
    }
}

/// The normalized L_p-Blaschke sum: the body whose volume-normalized
/// L_p-surface area measure is S_p(K,·)/V(K) + S_p(L,·)/V(L).
pub fn normalized_blaschke_sum(
    k: &Polytope,
    l: &Polytope,
    p: f64,
    cfg: &SolverConfig,
) -> Result<Polytope> {
    check_p(p)?;
    require_symmetric(k)?;
    require_symmetric(l)?;
    let mk = k.lp_surface_area_measure(p)?.scaled(1.0 / k.volume());
    let ml = l.lp_surface_area_measure(p)?.scaled(1.0 / l.volume());
    let mu = mk.add(&ml)?;
    let (body, report) = solve_normalized_even(&mu, p, cfg)?;
    if !report.converged {
        return Err(LpbmError::NotConverged {
            residual: report.final_residual,
            iterations: report.iterations,
        });
    }
    Ok(body)
}

/// The plain L_p-Blaschke sum (p ≠ n): the body with
/// S_p(K #_p L, ·) = S_p(K,·) + S_p(L,·).
pub fn blaschke_sum(k: &Polytope, l: &Polytope, p: f64, cfg: &SolverConfig) -> Result<Polytope> {
    check_p(p)?;
    require_symmetric(k)?;
    require_symmetric(l)?;
    let mu = k.lp_surface_area_measure(p)?.add(&l.lp_surface_area_measure(p)?)?;
    let (body, report) = solve_even(&mu, p, cfg)?;
    if !report.converged {
        return Err(LpbmError::NotConverged {
            residual: report.final_residual,
            iterations: report.iterations,
        });
    }
    Ok(body)
}

/// The grid data of the normalized curvature image: the even radial-power
/// density (½ρ_K^{n+p} + ½ρ_{-K}^{n+p}) dσ sampled at the grid directions.
pub fn curvature_data(k: &Polytope, p: f64, grid: &DirectionGrid) -> Result<DiscreteMeasure> {
    check_p(p)?;
    let n = grid.dim() as f64;
    let masses: Result<Vec<f64>> = grid
        .directions()
        .iter()
        .zip(grid.weights())
        .map(|(u, &w)| {
            let rk = k.radial(u)?;
            let rkm = k.radial(&-u)?;
            Ok(0.5 * (rk.powf(n + p) + rkm.powf(n + p)) * w)
        })
        .collect();
    DiscreteMeasure::on_grid(grid, masses?)
}

/// The normalized symmetric L_p-curvature image Λ̃K: the solution of the
/// normalized Minkowski problem for the radial-power density of K.
pub fn normalized_curvature_image(
    k: &Polytope,
    p: f64,
    grid: &DirectionGrid,
    cfg: &SolverConfig,
) -> Result<Polytope> {
    let mu = curvature_data(k, p, grid)?;
    let (body, _report) = solve_normalized_even(&mu, p, cfg)?;
    // Dense grid data may bottom out slightly above very tight tolerances;
    // the best iterate is still the meaningful answer, so non-convergence is
    // not an error here (the residual is in the report for callers that use
    // the solver directly).
    Ok(body)
}

/// The plain symmetric L_p-curvature image (p ≠ n):
/// ΛK = V(Λ̃K)^{1/(p-n)} Λ̃K.
pub fn curvature_image(
    k: &Polytope,
    p: f64,
    grid: &DirectionGrid,
    cfg: &SolverConfig,
) -> Result<Polytope> {
    let n = grid.dim() as f64;
    if (p - n).abs() <= 1e-6 {
        return Err(LpbmError::ExponentEqualsDim(p));
    }
    let tilde = normalized_curvature_image(k, p, grid, cfg)?;
    let t = tilde.volume().powf(1.0 / (p - n));
    Ok(tilde.dilated(t))
}

/// Converts a plain operator Z to its normalized form
/// Z̃K = V(ZK)^{-1/p} ZK; a degree-q operator becomes degree q(p-n)/p.
pub fn to_normalized(z: BodyValuedOperator, p: f64, n: f64) -> BodyValuedOperator {
    let degree = z.declared_degree.map(|q| q * (p - n) / p);
    BodyValuedOperator::new(
        format!("normalized({})", z.name),
        degree,
        z.declared_equivariance,
        move |k| {
            let out = z.apply(k)?;
            let v = out.volume()?;
            Ok(out.scaled(v.powf(-1.0 / p)))
        },
    )
}

/// Converts a normalized operator Z̃ back to plain form
/// ZK = V(Z̃K)^{1/(p-n)} Z̃K (p ≠ n); degree q becomes qp/(p-n).
pub fn from_normalized(z: BodyValuedOperator, p: f64, n: f64) -> Result<BodyValuedOperator> {
    if (p - n).abs() <= 1e-6 {
        return Err(LpbmError::ExponentEqualsDim(p));
    }
    let degree = z.declared_degree.map(|q| q * p / (p - n));
    Ok(BodyValuedOperator::new(
        format!("plain({})", z.name),
        degree,
        z.declared_equivariance,
        move |k| {
            let out = z.apply(k)?;
            let v = out.volume()?;
            Ok(out.scaled(v.powf(1.0 / (p - n))))
        },
    ))
}

/// The planar quarter turn ψ_{π/2}: (x, y) -> (-y, x). Polytopes rotate
/// exactly; sampled bodies permute support values by a quarter of the grid.
pub fn rotate_quarter(body: &AnyBody) -> Result<AnyBody> {
    match body {
        AnyBody::Polytope(p) => {
            if p.dim() != 2 {
                return Err(LpbmError::NotPlanar);
            }
            Ok(AnyBody::Polytope(p.apply_linear(&LinearMap::quarter_turn())?))
        }
        AnyBody::Sampled(s) => {
            if s.dim() != 2 {
                return Err(LpbmError::NotPlanar);
            }
            let res = s.grid().len();
            // h(ψK, u_k) = h(K, ψ^{-1}u_k) = h(K, u_{k - res/4}).
            let quarter = res / 4;
            Ok(AnyBody::Sampled(
                s.permuted(|i| (i + res - quarter) % res),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{bodies_equal, hausdorff_distance, SampledBody};
    use nalgebra::Vector3;
    use approx::assert_relative_eq;

    fn grid2() -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::build(2, 360).unwrap())
    }

    fn grid3() -> Arc<DirectionGrid> {
        Arc::new(DirectionGrid::build(3, 2562).unwrap())
    }

    fn loose_cfg() -> SolverConfig {
        SolverConfig {
            residual_tol: 1e-6,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn normalized_sum_of_discs() {
        let grid = grid2();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let sum = normalized_blaschke_sum(&b, &b, 2.0, &loose_cfg()).unwrap();
        let expected = 2.0f64.powf(-0.5);
        for u in grid.directions().iter().step_by(20) {
            assert_relative_eq!(sum.support(u), expected, max_relative = 1e-3);
        }
    }

    #[test]
    fn normalized_sum_commutes() {
        let grid = grid2();
        let k = Polytope::cuboid(2, &[1.0, 0.7]).unwrap();
        let l = Polytope::cross_polytope(2, 1.0).unwrap();
        let cfg = SolverConfig::default();
        let a = normalized_blaschke_sum(&k, &l, 2.5, &cfg).unwrap();
        let b = normalized_blaschke_sum(&l, &k, 2.5, &cfg).unwrap();
        assert!(hausdorff_distance(&a, &b, &grid) <= 1e-9);
    }

    #[test]
    fn plain_sum_of_discs() {
        // Unit discs, p = 3, n = 2: the density doubles, so r^{n-p} = 2 and
        // the radius is 2^{1/(n-p)} = 1/2.
        let grid = grid2();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let sum = blaschke_sum(&b, &b, 3.0, &loose_cfg()).unwrap();
        for u in grid.directions().iter().step_by(20) {
            assert_relative_eq!(sum.support(u), 0.5, max_relative = 1e-3);
        }
    }

    #[test]
    fn plain_sum_defining_equation() {
        let k = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
        let p = 3.0;
        let sum = blaschke_sum(&k, &k, p, &SolverConfig::default()).unwrap();
        let mu = k.lp_surface_area_measure(p).unwrap().scaled(2.0);
        let r = crate::minkowski::residual(&sum, p, &mu, false).unwrap();
        assert!(r <= 1e-7, "residual {r}");
    }

    #[test]
    fn plain_sum_associative_on_balls() {
        let grid = grid2();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let p = 3.0;
        let cfg = loose_cfg();
        let ab = blaschke_sum(&b, &b, p, &cfg).unwrap();
        let abc1 = blaschke_sum(&ab, &b, p, &cfg).unwrap();
        let bc = blaschke_sum(&b, &b, p, &cfg).unwrap();
        let abc2 = blaschke_sum(&b, &bc, p, &cfg).unwrap();
        // Radii compose as r^{n-p} sums: r = 3^{1/(2-3)} = 1/3.
        for u in grid.directions().iter().step_by(30) {
            assert_relative_eq!(abc1.support(u), 1.0 / 3.0, max_relative = 2e-3);
            assert_relative_eq!(abc1.support(u), abc2.support(u), max_relative = 1e-3);
        }
    }

    #[test]
    fn sum_rejects_asymmetric_input() {
        let tri = Polytope::from_points(
            2,
            &[
                Vector3::new(2.0, 0.0, 0.0),
                Vector3::new(-0.5, 1.0, 0.0),
                Vector3::new(-0.5, -1.0, 0.0),
            ],
        )
        .unwrap();
        let sq = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
        assert!(matches!(
            normalized_blaschke_sum(&tri, &sq, 2.0, &SolverConfig::default()),
            Err(LpbmError::NotOriginSymmetric)
        ));
    }

    #[test]
    fn curvature_image_of_disc() {
        // Density 1 data: radius kappa_2^{-1/p} = pi^{-1/2} for p = 2.
        let grid = grid2();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let tilde = normalized_curvature_image(&b, 2.0, &grid, &loose_cfg()).unwrap();
        let expected = std::f64::consts::PI.powf(-0.5);
        for u in grid.directions().iter().step_by(20) {
            assert_relative_eq!(tilde.support(u), expected, max_relative = 1e-3);
        }
    }

    #[test]
    fn curvature_image_of_ball_dim3() {
        let grid = grid3();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let tilde = normalized_curvature_image(&b, 2.0, &grid, &loose_cfg()).unwrap();
        let kappa3 = 4.0 * std::f64::consts::PI / 3.0;
        let expected = kappa3.powf(-0.5);
        for u in grid.directions().iter().step_by(100) {
            assert_relative_eq!(tilde.support(u), expected, max_relative = 2e-3);
        }
    }

    #[test]
    fn curvature_image_homogeneity() {
        // Lambda-tilde(2B) has radius 2^{-n/p-1} times that of
        // Lambda-tilde(B): degree -2 at n = p = 2.
        let grid = grid2();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let cfg = loose_cfg();
        let one = normalized_curvature_image(&b, 2.0, &grid, &cfg).unwrap();
        let two = normalized_curvature_image(&b.dilated(2.0), 2.0, &grid, &cfg).unwrap();
        for u in grid.directions().iter().step_by(30) {
            assert_relative_eq!(two.support(u), 0.25 * one.support(u), max_relative = 1e-3);
        }
    }

    #[test]
    fn plain_curvature_image_fixes_ball() {
        let grid = grid2();
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let lam = curvature_image(&b, 3.0, &grid, &loose_cfg()).unwrap();
        for u in grid.directions().iter().step_by(20) {
            assert_relative_eq!(lam.support(u), 1.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn plain_matches_scaled_normalized() {
        let grid = grid2();
        let k = Polytope::cuboid(2, &[1.0, 0.8]).unwrap();
        let p = 3.0;
        let cfg = loose_cfg();
        let lam = curvature_image(&k, p, &grid, &cfg).unwrap();
        let tilde = normalized_curvature_image(&k, p, &grid, &cfg).unwrap();
        let scaled = tilde.dilated(tilde.volume().powf(1.0 / (p - 2.0)));
        assert!(bodies_equal(&lam, &scaled, &grid, 1e-6));
    }

    #[test]
    fn conversion_round_trip() {
        let grid = grid2();
        let p = 3.0;
        let n = 2.0;
        let z = BodyValuedOperator::curvature_image(p, Arc::clone(&grid), loose_cfg());
        let degree = z.declared_degree.unwrap();
        let round = from_normalized(to_normalized(z, p, n), p, n).unwrap();
        assert_relative_eq!(round.declared_degree.unwrap(), degree, max_relative = 1e-12);
        let k = Polytope::cuboid(2, &[1.0, 0.7]).unwrap();
        let z2 = BodyValuedOperator::curvature_image(p, Arc::clone(&grid), loose_cfg());
        let a = z2.apply(&k).unwrap();
        let b = round.apply(&k).unwrap();
        assert!(hausdorff_distance(&a, &b, &grid) <= 1e-6 * (1.0 + a.mean_support(&grid)));
    }

    #[test]
    fn normalized_operator_matches_direct_path() {
        // to_normalized(plain curvature image) agrees with the directly
        // normalized curvature image.
        let grid = grid2();
        let p = 3.0;
        let n = 2.0;
        let plain = BodyValuedOperator::curvature_image(p, Arc::clone(&grid), loose_cfg());
        let viafrom = to_normalized(plain, p, n);
        let b = Polytope::ball_approximation(&grid, 1.0).unwrap();
        let a = viafrom.apply(&b).unwrap();
        let direct = normalized_curvature_image(&b, p, &grid, &loose_cfg()).unwrap();
        assert!(hausdorff_distance(&a, &direct, &grid) <= 2e-3);
    }

    #[test]
    fn degree_bookkeeping() {
        let p = 3.0;
        let n = 2.0;
        let q = -n / p - 1.0;
        // Lemma chains: normalized degree -n/p-1 converts to plain degree
        // q p/(p-n) = -5 at n=2, p=3.
        assert_relative_eq!(q * p / (p - n), -5.0, max_relative = 1e-12);
    }

    #[test]
    fn quarter_turn_on_polytopes() {
        let sq = Polytope::cuboid(2, &[1.0, 1.0]).unwrap();
        let rot = rotate_quarter(&AnyBody::Polytope(sq.clone())).unwrap();
        let grid = grid2();
        assert!(bodies_equal(&rot, &sq, &grid, 1e-9));
        let rect = Polytope::cuboid(2, &[2.0, 1.0]).unwrap();
        let rot = rotate_quarter(&AnyBody::Polytope(rect)).unwrap();
        let expected = Polytope::cuboid(2, &[1.0, 2.0]).unwrap();
        assert!(bodies_equal(&rot, &expected, &grid, 1e-9));
    }

    #[test]
    fn quarter_turn_on_sampled_bodies() {
        let grid = grid2();
        let rect = Polytope::cuboid(2, &[2.0, 1.0]).unwrap();
        let sampled = SampledBody::from_polytope(Arc::clone(&grid), &rect).unwrap();
        let rot = rotate_quarter(&AnyBody::Sampled(sampled)).unwrap();
        let expected = Polytope::cuboid(2, &[1.0, 2.0]).unwrap();
        assert!(bodies_equal(&rot, &expected, &grid, 1e-9));
    }

    #[test]
    fn quarter_turn_requires_dim2() {
        let cube = Polytope::cuboid(3, &[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            rotate_quarter(&AnyBody::Polytope(cube)),
            Err(LpbmError::NotPlanar)
        ));
    }

    #[test]
    fn contravariance_of_curvature_image() {
        // Eq-(42)-shaped identity: the normalized curvature image of phi K
        // equals (det phi)^{-1/p} phi^{-t} applied to the image of K.
        let grid = grid2();
        let p = 2.0;
        let cfg = loose_cfg();
        let k = Polytope::cuboid(2, &[1.0, 0.8]).unwrap();
        let phi = LinearMap::from_2d(1.2, 0.3, -0.1, 1.0).unwrap();
        let lhs = normalized_curvature_image(&k.apply_linear(&phi).unwrap(), p, &grid, &cfg)
            .unwrap();
        let tilde = normalized_curvature_image(&k, p, &grid, &cfg).unwrap();
        let rhs = tilde
            .apply_linear(&phi.inverse_transpose())
            .unwrap()
            .dilated(phi.det().powf(-1.0 / p));
        assert!(
            hausdorff_distance(&lhs, &rhs, &grid) <= 1e-3 * (1.0 + rhs.scale()),
            "gap {}",
            hausdorff_distance(&lhs, &rhs, &grid)
        );
    }
}
