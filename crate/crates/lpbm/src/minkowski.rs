//! Variational solver for the discrete volume-normalized even L_p-Minkowski
//! problem: given an even measure μ on the sphere (not concentrated on a
//! great subsphere) and p > 1, find the origin-symmetric polytope K̃ with
//! facet normals in supp(μ) whose normalized L_p-surface area measure
//! S_p(K̃,·)/V(K̃) equals μ. The normalized problem is solvable for every
//! p > 1 including p = n; the plain problem S_p(K,·) = μ is recovered for
//! p ≠ n by the scaling K = V(K̃)^{1/(p-n)} K̃.
//!
//! The algorithm minimizes F(h) = Σ hᵢ^p μᵢ over support numbers h = exp(s)
//! of Wulff shapes, with the volume constraint V = 1 restored by exact
//! rescaling after every step (V is degree-n homogeneous in h). Antipodal
//! support pairs share one variable, so iterates are origin-symmetric by
//! construction. Steps use an L-BFGS direction with monotone backtracking;
//! the objective history never increases. At the minimizer the KKT condition
//! hᵢ^{p-1}μᵢ = c·Aᵢ holds for a constant c read off by least squares, and
//! the final body is the minimizer dilated by c^{-1/p}.

use nalgebra::Vector3;

use crate::body::{halfspace_geometry, Polytope};
use crate::error::{LpbmError, Result};
use crate::spherical::DiscreteMeasure;
use crate::transform::check_p;

/// Step-size and stopping configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop when the max relative deviation of the normalized measure from μ
    /// falls below this.
    pub residual_tol: f64,
    /// Backtracking shrink factor, in (0, 1).
    pub shrink: f64,
    /// Step growth factor after an accepted gradient step, > 1.
    pub growth: f64,
    pub initial_step: f64,
    /// Floor on support numbers; facets may transiently degenerate but their
    /// support values never collapse to zero.
    pub min_support: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 5000,
            residual_tol: 1e-8,
            shrink: 0.5,
            growth: 1.1,
            initial_step: 0.1,
            min_support: 1e-10,
        }
    }
}

/// Outcome summary of one solve.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub iterations: usize,
    pub final_residual: f64,
    /// Objective value after every accepted step; non-increasing.
    pub objective_history: Vec<f64>,
    pub converged: bool,
}

/// Solves S_p(K̃,·)/V(K̃) = μ for the unique origin-symmetric body, starting
/// from the unit-support initializer.
pub fn solve_normalized_even(
    mu: &DiscreteMeasure,
    p: f64,
    cfg: &SolverConfig,
) -> Result<(Polytope, SolverReport)> {
    solve_normalized_even_from(mu, p, cfg, None)
}

/// As [`solve_normalized_even`] but from caller-chosen initial support
/// values, one per direction of μ (used by the uniqueness probe).
pub fn solve_normalized_even_from(
    mu: &DiscreteMeasure,
    p: f64,
    cfg: &SolverConfig,
    initial_support: Option<&[f64]>,
) -> Result<(Polytope, SolverReport)> {
    check_p(p)?;
    if !mu.is_even() {
        return Err(LpbmError::NotEven);
    }
    mu.check_minkowski_data()?;
    let problem = Problem::build(mu, p, cfg)?;
    problem.solve(initial_support)
}

/// Solves the plain problem S_p(K,·) = μ for p ≠ n via the normalized
/// solution and the V^{1/(p-n)} dilation.
pub fn solve_even(
    mu: &DiscreteMeasure,
    p: f64,
    cfg: &SolverConfig,
) -> Result<(Polytope, SolverReport)> {
    let n = mu.dim() as f64;
    if (p - n).abs() <= 1e-6 {
        return Err(LpbmError::ExponentEqualsDim(p));
    }
    let (ktilde, report) = solve_normalized_even(mu, p, cfg)?;
    let t = ktilde.volume().powf(1.0 / (p - n));
    Ok((ktilde.dilated(t), report))
}

/// Max over supp(μ) of the relative deviation of hᵢ^{1-p}Aᵢ (divided by V
/// when `normalized`) from μᵢ. Facet normals of K must match supp(μ).
pub fn residual(k: &Polytope, p: f64, mu: &DiscreteMeasure, normalized: bool) -> Result<f64> {
    check_p(p)?;
    let v = if normalized { k.volume() } else { 1.0 };
    // Facets of K not present in supp(mu) invalidate the comparison.
    for f in k.facets() {
        let matched = mu
            .directions()
            .iter()
            .zip(mu.masses())
            .any(|(u, &m)| m > 0.0 && (u - f.normal).norm() <= 1e-9);
        if !matched {
            return Err(LpbmError::NormalMismatch);
        }
    }
    let mut worst = 0.0f64;
    for (u, &m) in mu.directions().iter().zip(mu.masses()) {
        if m <= 0.0 {
            continue;
        }
        let density = k
            .facets()
            .iter()
            .find(|f| (f.normal - u).norm() <= 1e-9)
            .map(|f| f.offset.powf(1.0 - p) * f.area / v)
            .unwrap_or(0.0);
        worst = worst.max((density - m).abs() / m);
    }
    Ok(worst)
}

/// The solver's internal view of one problem instance: support directions
/// restricted to supp(μ), antipodal pairs sharing a variable.
struct Problem<'a> {
    dim: usize,
    p: f64,
    cfg: &'a SolverConfig,
    /// Directions with positive mass.
    normals: Vec<Vector3<f64>>,
    masses: Vec<f64>,
    /// Variable index for each direction; antipodal directions share one.
    var_of: Vec<usize>,
    /// One representative direction index per variable.
    rep_of: Vec<usize>,
}

#[derive(Clone)]
struct Evaluation {
    h: Vec<f64>,
    areas: Vec<f64>,
    volume: f64,
    /// F·V^{-p/n}, the scale-invariant objective.
    objective: f64,
    gradient: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn build(mu: &DiscreteMeasure, p: f64, cfg: &'a SolverConfig) -> Result<Self> {
        let mut keep: Vec<usize> = Vec::new();
        for (i, &m) in mu.masses().iter().enumerate() {
            if m > 0.0 {
                keep.push(i);
            }
        }
        let pos_of: std::collections::HashMap<usize, usize> =
            keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let normals: Vec<Vector3<f64>> = keep.iter().map(|&i| mu.directions()[i]).collect();
        let masses: Vec<f64> = keep.iter().map(|&i| mu.masses()[i]).collect();
        let mut var_of = vec![usize::MAX; keep.len()];
        let mut rep_of = Vec::new();
        for (k, &i) in keep.iter().enumerate() {
            if var_of[k] != usize::MAX {
                continue;
            }
            let anti = mu.antipode_index()[i];
            let ak = *pos_of.get(&anti).ok_or(LpbmError::NotEven)?;
            let var = rep_of.len();
            var_of[k] = var;
            var_of[ak] = var;
            rep_of.push(k);
        }
        Ok(Problem {
            dim: mu.dim(),
            p,
            cfg,
            normals,
            masses,
            var_of,
            rep_of,
        })
    }

    fn supports(&self, s: &[f64]) -> Vec<f64> {
        self.var_of
            .iter()
            .map(|&v| s[v].exp().max(self.cfg.min_support))
            .collect()
    }

    fn evaluate(&self, s: &[f64]) -> Result<Evaluation> {
        let n = self.dim as f64;
        let p = self.p;
        let h = self.supports(s);
        let geo = halfspace_geometry(self.dim, &self.normals, &h)?;
        let volume = geo.volume;
        let f: f64 = h
            .iter()
            .zip(&self.masses)
            .map(|(&hi, &mi)| hi.powf(p) * mi)
            .sum();
        let vpow = volume.powf(-p / n);
        let objective = f * vpow;
        let mut grad = vec![0.0; self.rep_of.len()];
        for (i, (&hi, &mi)) in h.iter().zip(&self.masses).enumerate() {
            let var = self.var_of[i];
            // dF/ds += p h^p mu; dV/ds += h A (chain rule through exp).
            grad[var] += vpow * p * hi.powf(p) * mi
                - (p / n) * f * vpow / volume * hi * geo.areas[i];
        }
        Ok(Evaluation {
            h,
            areas: geo.areas,
            volume,
            objective,
            gradient: grad,
        })
    }

    /// KKT constant c from hᵢ^{p-1}μᵢ ≈ c·Aᵢ by least squares over present
    /// facets.
    fn kkt_constant(&self, eval: &Evaluation) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.normals.len() {
            let a = eval.areas[i];
            num += a * eval.h[i].powf(self.p - 1.0) * self.masses[i];
            den += a * a;
        }
        num / den
    }

    /// Residual of the c^{-1/p}-rescaled iterate against μ without
    /// rebuilding the hull: S_p(tK)/V(tK) = t^{-p}·h^{1-p}A/V.
    fn iterate_residual(&self, eval: &Evaluation, c: f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.normals.len() {
            let density = c * eval.h[i].powf(1.0 - self.p) * eval.areas[i] / eval.volume;
            worst = worst.max((density - self.masses[i]).abs() / self.masses[i]);
        }
        worst
    }

    fn solve(&self, initial_support: Option<&[f64]>) -> Result<(Polytope, SolverReport)> {
        let nvars = self.rep_of.len();
        let mut s = vec![0.0; nvars];
        if let Some(init) = initial_support {
            if init.len() != self.var_of.len() {
                return Err(LpbmError::Invalid(
                    "initial support length does not match measure support".into(),
                ));
            }
            for (var, &rep) in self.rep_of.iter().enumerate() {
                if init[rep] <= 0.0 {
                    return Err(LpbmError::Invalid("initial support must be positive".into()));
                }
                s[var] = init[rep].ln();
            }
        }

        let mut eval = self.evaluate(&s)?;
        self.renormalize(&mut s, &mut eval);
        let mut history = vec![eval.objective];
        let mut lbfgs = LbfgsMemory::new(10);
        let mut grad_step = self.cfg.initial_step;
        let mut best: Option<(Vec<f64>, Evaluation, f64)> = None;
        let mut iterations = 0;
        let mut stagnant = 0usize;

        for iter in 0..self.cfg.max_iterations {
            iterations = iter + 1;
            let c = self.kkt_constant(&eval);
            let res = self.iterate_residual(&eval, c);
            match &mut best {
                Some((bs, be, br)) if res < *br => {
                    *bs = s.clone();
                    *be = eval.clone();
                    *br = res;
                }
                None => best = Some((s.clone(), eval.clone(), res)),
                _ => {}
            }
            if res <= self.cfg.residual_tol {
                return self.finish(&eval, c, iterations, res, history, true);
            }

            let search = |dir: &[f64], descent: f64, mut step: f64| {
                for _ in 0..60 {
                    let trial: Vec<f64> = s
                        .iter()
                        .zip(dir)
                        .map(|(&si, &di)| si + step * di)
                        .collect();
                    match self.evaluate(&trial) {
                        Ok(te)
                            if te.objective
                                <= eval.objective + 1e-4 * step * descent =>
                        {
                            return Some((trial, te, step));
                        }
                        _ => step *= self.cfg.shrink,
                    }
                }
                None
            };
            let neg_gradient = || {
                let dir: Vec<f64> = eval.gradient.iter().map(|g| -g).collect();
                let descent = -eval.gradient.iter().map(|g| g * g).sum::<f64>();
                (dir, descent)
            };

            let dir = lbfgs.direction(&eval.gradient);
            let descent: f64 = dir.iter().zip(&eval.gradient).map(|(d, g)| d * g).sum();
            let mut accepted = if descent < 0.0 {
                search(&dir, descent, 1.0)
            } else {
                None
            };
            if accepted.is_none() {
                // The quasi-Newton direction made no progress at
                // floating-point resolution; restart along the gradient.
                lbfgs.clear();
                let (dir, descent) = neg_gradient();
                accepted = search(&dir, descent, grad_step);
            }

            let Some((new_s, mut new_eval, step)) = accepted else {
                // No descent possible at floating-point resolution.
                break;
            };
            if lbfgs.is_empty() {
                grad_step = (step * self.cfg.growth).min(10.0);
            }
            lbfgs.push(&s, &eval.gradient, &new_s, &new_eval.gradient);
            s = new_s;
            self.renormalize(&mut s, &mut new_eval);
            // Accepted steps whose decrease is at float resolution mean the
            // descent phase is done; the polish takes over from here.
            if eval.objective - new_eval.objective <= 1e-14 * eval.objective.abs() {
                stagnant += 1;
                if stagnant >= 3 {
                    eval = new_eval;
                    history.push(eval.objective);
                    break;
                }
            } else {
                stagnant = 0;
            }
            eval = new_eval;
            history.push(eval.objective);
        }

        let (s, mut eval, mut res) = best.expect("at least one iterate evaluated");
        // Near the minimum the objective can be flat below float resolution
        // while per-facet densities still miss the target (small facets are
        // loosely determined by the objective). The densities themselves are
        // evaluable at full precision, so a Gauss-Newton polish on the
        // density gaps can pass the descent floor. Kept to small problems;
        // dense grid data converges in the main loop.
        if res > self.cfg.residual_tol && self.rep_of.len() <= 64 {
            if let Some((pe, pr)) = self.polish(&s, &eval, res)? {
                eval = pe;
                res = pr;
            }
        }
        let c = self.kkt_constant(&eval);
        self.finish(&eval, c, iterations, res, history, res <= self.cfg.residual_tol)
    }

    /// Per-variable gap of ln(h^{1-p}A/(Vμ)) from its mean over variables;
    /// identically zero exactly at a solution of the normalized problem up
    /// to global scale. None when a facet has dropped out of the hull.
    fn density_gaps(&self, eval: &Evaluation) -> Option<Vec<f64>> {
        let nvars = self.rep_of.len();
        let mut g = vec![0.0; nvars];
        let mut cnt = vec![0.0; nvars];
        for i in 0..self.normals.len() {
            if eval.areas[i] <= 0.0 {
                return None;
            }
            let d = (eval.h[i].powf(1.0 - self.p) * eval.areas[i]
                / (eval.volume * self.masses[i]))
                .ln();
            g[self.var_of[i]] += d;
            cnt[self.var_of[i]] += 1.0;
        }
        for (gi, c) in g.iter_mut().zip(&cnt) {
            *gi /= c;
        }
        let mean = g.iter().sum::<f64>() / nvars as f64;
        for gi in g.iter_mut() {
            *gi -= mean;
        }
        Some(g)
    }

    /// Gauss-Newton refinement of the density gaps with a forward-difference
    /// Jacobian, accepting only steps that reduce the residual.
    fn polish(
        &self,
        s0: &[f64],
        eval0: &Evaluation,
        res0: f64,
    ) -> Result<Option<(Evaluation, f64)>> {
        let nvars = self.rep_of.len();
        let mut s = s0.to_vec();
        let mut eval = eval0.clone();
        let mut res = res0;
        let mut improved = false;
        'outer: for _ in 0..12 {
            if res <= self.cfg.residual_tol {
                break;
            }
            let Some(g) = self.density_gaps(&eval) else {
                break;
            };
            // Central differences: forward differencing leaves enough
            // truncation error in the Jacobian to stall above 1e-7.
            let eps = 1e-5;
            let mut jac = nalgebra::DMatrix::zeros(nvars, nvars);
            for j in 0..nvars {
                let mut hi = s.clone();
                hi[j] += eps;
                let mut lo = s.clone();
                lo[j] -= eps;
                let (Some(gh), Some(gl)) = (
                    self.density_gaps(&self.evaluate(&hi)?),
                    self.density_gaps(&self.evaluate(&lo)?),
                ) else {
                    break 'outer;
                };
                for i in 0..nvars {
                    jac[(i, j)] = (gh[i] - gl[i]) / (2.0 * eps);
                }
            }
            let rhs = nalgebra::DVector::from_iterator(nvars, g.iter().map(|x| -x));
            let Ok(delta) = jac.svd(true, true).solve(&rhs, 1e-10) else {
                break;
            };
            let mut alpha = 1.0;
            let mut stepped = false;
            for _ in 0..6 {
                let mut trial: Vec<f64> = s
                    .iter()
                    .enumerate()
                    .map(|(i, &si)| si + alpha * delta[i])
                    .collect();
                if let Ok(mut te) = self.evaluate(&trial) {
                    // The residual rescale constant assumes unit volume.
                    self.renormalize(&mut trial, &mut te);
                    let tr = self.iterate_residual(&te, self.kkt_constant(&te));
                    if tr < res {
                        s = trial;
                        eval = te;
                        res = tr;
                        improved = true;
                        stepped = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !stepped {
                break;
            }
        }
        Ok(if improved { Some((eval, res)) } else { None })
    }

    /// Shift s so the iterate has unit volume; the geometry scales exactly.
    fn renormalize(&self, s: &mut [f64], eval: &mut Evaluation) {
        let n = self.dim as f64;
        let t = eval.volume.powf(-1.0 / n);
        let shift = t.ln();
        for si in s.iter_mut() {
            *si += shift;
        }
        for h in eval.h.iter_mut() {
            *h *= t;
        }
        for a in eval.areas.iter_mut() {
            *a *= t.powi(self.dim as i32 - 1);
        }
        eval.volume = 1.0;
    }

    fn finish(
        &self,
        eval: &Evaluation,
        c: f64,
        iterations: usize,
        final_residual: f64,
        objective_history: Vec<f64>,
        converged: bool,
    ) -> Result<(Polytope, SolverReport)> {
        let t = c.powf(-1.0 / self.p);
        let offsets: Vec<f64> = eval.h.iter().map(|&h| h * t).collect();
        let body = Polytope::from_halfspaces(self.dim, &self.normals, &offsets)?;
        Ok((
            body,
            SolverReport {
                iterations,
                final_residual,
                objective_history,
                converged,
            },
        ))
    }
}

/// Limited-memory BFGS two-loop recursion.
struct LbfgsMemory {
    capacity: usize,
    pairs: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)>,
}

impl LbfgsMemory {
    fn new(capacity: usize) -> Self {
        LbfgsMemory {
            capacity,
            pairs: std::collections::VecDeque::new(),
        }
    }

    fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn clear(&mut self) {
        self.pairs.clear();
    }

    fn push(&mut self, s0: &[f64], g0: &[f64], s1: &[f64], g1: &[f64]) {
        let ds: Vec<f64> = s1.iter().zip(s0).map(|(a, b)| a - b).collect();
        let dg: Vec<f64> = g1.iter().zip(g0).map(|(a, b)| a - b).collect();
        let curvature: f64 = ds.iter().zip(&dg).map(|(a, b)| a * b).sum();
        let scale: f64 = ds.iter().map(|x| x * x).sum::<f64>().sqrt()
            * dg.iter().map(|x| x * x).sum::<f64>().sqrt();
        if curvature > 1e-12 * scale.max(1e-300) {
            if self.pairs.len() == self.capacity {
                self.pairs.pop_front();
            }
            self.pairs.push_back((ds, dg, curvature));
        }
    }

    fn direction(&self, gradient: &[f64]) -> Vec<f64> {
        let mut q: Vec<f64> = gradient.to_vec();
        if self.pairs.is_empty() {
            return q.iter().map(|g| -g).collect();
        }
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (ds, dg, sy) in self.pairs.iter().rev() {
            let alpha = ds.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / sy;
            for (qi, dgi) in q.iter_mut().zip(dg) {
                *qi -= alpha * dgi;
            }
            alphas.push(alpha);
        }
        let (_, dg, sy) = self.pairs.back().unwrap();
        let yy: f64 = dg.iter().map(|y| y * y).sum();
        let gamma = sy / yy;
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((ds, dg, sy), &alpha) in self.pairs.iter().zip(alphas.iter().rev()) {
            let beta = dg.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / sy;
            for (qi, dsi) in q.iter_mut().zip(ds) {
                *qi += (alpha - beta) * dsi;
            }
        }
        q.iter().map(|x| -x).collect()
    }
}
