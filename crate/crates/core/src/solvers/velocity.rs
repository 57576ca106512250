//! Velocity step: minimize `½ wᵀKw - rhsᵀw + Σ_g c_g |ξ_g(w)|` where
//! `ξ_g` is the tangential velocity at a contact Gauss point.
//!
//! The kink is smoothed to `c_g (sqrt(ξ² + ρ²) - ρ)` and `ρ` is driven down
//! by continuation. Each stage runs a primal-dual Newton iteration that keeps
//! a multiplier `λ_g ≈ ξ_g / s_g` per point, so the Hessian stays well scaled
//! once `ρ` is far below the slip velocities.

use super::cg::pcg_solve_into;
use super::SolverTolerances;
use crate::assembly::ContactQuadrature;
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::sparse::{dot, norm, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageReport {
    pub rho: f64,
    pub iterations: usize,
    pub energy_start: f64,
    pub energy_end: f64,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocitySolution {
    pub w: Vec<f64>,
    pub stages: Vec<StageReport>,
}

impl VelocitySolution {
    pub fn newton_iterations(&self) -> usize {
        self.stages.iter().map(|s| s.iterations).sum()
    }
}

/// Energy of the velocity problem, smoothed with `rho` or exact for `None`.
pub fn velocity_energy(
    k: &CsrMatrix,
    rhs: &[f64],
    contact: &ContactQuadrature,
    model: &FrictionModel,
    w: &[f64],
    rho: Option<f64>,
) -> f64 {
    let smooth = 0.5 * k.quadratic_form(w) - dot(rhs, w);
    smooth
        + match rho {
            Some(r) => contact.regularized_integral(model, w, r),
            None => contact.friction_integral(model, w),
        }
}

struct Problem<'a> {
    k: &'a CsrMatrix,
    rhs: &'a [f64],
    contact: &'a ContactQuadrature,
    /// `weight · bound` per Gauss point.
    c: Vec<f64>,
}

impl Problem<'_> {
    fn energy_and_gradient(&self, w: &[f64], rho: f64, grad: &mut [f64]) -> f64 {
        self.k.matvec_into(w, grad);
        let mut e = 0.5 * dot(w, grad) - dot(self.rhs, w);
        for (g, r) in grad.iter_mut().zip(self.rhs) {
            *g -= r;
        }
        for (p, &c) in self.contact.points.iter().zip(&self.c) {
            let xi = p.tangential(w);
            let s = xi.hypot(rho);
            e += c * (s - rho);
            for &(dof, coeff) in &p.terms {
                if let Some(i) = dof {
                    grad[i] += c * coeff * xi / s;
                }
            }
        }
        e
    }

    /// Size of the rounding error in the computed gradient. Near a sticking
    /// point the smoothed friction force varies like `c / ρ`, so tiny `ρ`
    /// amplifies the rounding in `ξ`.
    fn gradient_noise(&self, w: &[f64], rho: f64) -> f64 {
        let n = w.len();
        let mut noise: Vec<f64> = (0..n)
            .map(|i| {
                let kw: f64 = self.k.row(i).map(|(j, v)| (v * w[j]).abs()).sum();
                16.0 * f64::EPSILON * (kw + self.rhs[i].abs())
            })
            .collect();
        for (p, &c) in self.contact.points.iter().zip(&self.c) {
            let xi = p.tangential(w);
            let s = xi.hypot(rho);
            let size: f64 = p
                .terms
                .iter()
                .filter_map(|&(dof, coeff)| dof.map(|i| (coeff * w[i]).abs()))
                .sum();
            let force = c * rho * rho / (s * s * s) * 4.0 * f64::EPSILON * size;
            for &(dof, coeff) in &p.terms {
                if let Some(i) = dof {
                    noise[i] += force * coeff.abs();
                }
            }
        }
        norm(&noise)
    }

    fn hessian(&self, w: &[f64], rho: f64, lambda: &[f64]) -> CsrMatrix {
        let mut h = self.k.clone();
        let mut extra = Vec::new();
        for ((p, &c), &lam) in self.contact.points.iter().zip(&self.c).zip(lambda) {
            let xi = p.tangential(w);
            let s = xi.hypot(rho);
            let d = c * (1.0 - lam * xi / s).max(0.0) / s;
            for &(di, ci) in &p.terms {
                for &(dj, cj) in &p.terms {
                    if let (Some(i), Some(j)) = (di, dj) {
                        let v = d * ci * cj;
                        if !h.add_at(i, j, v) {
                            extra.push((i, j, v));
                        }
                    }
                }
            }
        }
        if extra.is_empty() {
            h
        } else {
            let n = h.dim();
            h.linear_combination(1.0, &CsrMatrix::from_triplets(n, extra), 1.0)
        }
    }
}

/// Solves the velocity problem. `warm` seeds the iteration and must have
/// the length of `rhs`.
pub fn solve_velocity_step(
    k: &CsrMatrix,
    rhs: &[f64],
    contact: &ContactQuadrature,
    model: &FrictionModel,
    warm: Option<&[f64]>,
    tol: &SolverTolerances,
) -> Result<VelocitySolution> {
    let n = rhs.len();
    if k.dim() != n {
        return Err(Error::InvalidInput(format!(
            "operator has dimension {} but the right-hand side has {n} entries",
            k.dim()
        )));
    }
    if let Some(w0) = warm {
        if w0.len() != n {
            return Err(Error::InvalidInput("warm start has the wrong length".into()));
        }
    }
    if rhs.iter().all(|&r| r == 0.0) {
        return Ok(VelocitySolution {
            w: vec![0.0; n],
            stages: Vec::new(),
        });
    }
    let mut w = warm.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    if contact.is_empty() || model.bound == 0.0 {
        pcg_solve_into(k, rhs, &mut w, tol.cg_rel_tol, tol.cg_max_iters)?;
        return Ok(VelocitySolution { w, stages: Vec::new() });
    }

    let problem = Problem {
        k,
        rhs,
        contact,
        c: contact.points.iter().map(|p| p.weight * model.bound).collect(),
    };
    let scale = norm(rhs).max(1.0);
    let final_tol = tol.newton_grad_tol * scale;
    let schedule = tol.rho_schedule();
    let mut lambda: Vec<f64> = {
        let rho = schedule[0];
        contact
            .points
            .iter()
            .map(|p| {
                let xi = p.tangential(&w);
                xi / xi.hypot(rho)
            })
            .collect()
    };

    let mut stages = Vec::with_capacity(schedule.len());
    let mut grad = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    for (si, &rho) in schedule.iter().enumerate() {
        let last = si + 1 == schedule.len();
        let stage_tol = if last { final_tol } else { final_tol.max(1e-6 * scale) };
        let mut energy = problem.energy_and_gradient(&w, rho, &mut grad);
        let energy_start = energy;
        let mut gnorm = norm(&grad);
        let mut iterations = 0;
        while gnorm > stage_tol.max(problem.gradient_noise(&w, rho)) {
            if iterations == tol.newton_max_iters {
                return Err(Error::NonConvergence {
                    solver: "regularized Newton (velocity)",
                    iterations,
                    residual: gnorm,
                });
            }
            iterations += 1;

            let h = problem.hessian(&w, rho, &lambda);
            let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
            let mut dir = vec![0.0; n];
            let forcing = (gnorm / scale).sqrt().clamp(tol.cg_rel_tol, 1e-2);
            let newton_ok = pcg_solve_into(&h, &neg_grad, &mut dir, forcing, tol.cg_max_iters).is_ok()
                && dot(&dir, &grad) < 0.0;
            if !newton_ok {
                dir = h
                    .diagonal()
                    .iter()
                    .zip(&grad)
                    .map(|(d, g)| -g / d.max(f64::MIN_POSITIVE))
                    .collect();
            }

            let slope = dot(&dir, &grad);
            let mut alpha = 1.0;
            let mut trial = vec![0.0; n];
            let accepted = loop {
                for i in 0..n {
                    trial[i] = w[i] + alpha * dir[i];
                }
                let e = problem.energy_and_gradient(&trial, rho, &mut trial_grad);
                let slack = 1e-14 * (energy.abs() + e.abs());
                if e <= energy + 1e-4 * alpha * slope + slack || norm(&trial_grad) <= (1.0 - 1e-4 * alpha) * gnorm {
                    break Some(e);
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    break None;
                }
            };
            let Some(e_new) = accepted else {
                return Err(Error::NonConvergence {
                    solver: "regularized Newton line search (velocity)",
                    iterations,
                    residual: gnorm,
                });
            };

            for (lam, p) in lambda.iter_mut().zip(&contact.points) {
                let xi = p.tangential(&w);
                let s = xi.hypot(rho);
                let d = (1.0 - *lam * xi / s).max(0.0) / s;
                let dxi = p.tangential(&trial) - xi;
                *lam = (*lam + (xi / s - *lam) + d * dxi).clamp(-1.0, 1.0);
            }
            std::mem::swap(&mut w, &mut trial);
            std::mem::swap(&mut grad, &mut trial_grad);
            energy = e_new;
            gnorm = norm(&grad);
        }
        log::trace!("rho = {rho:e}: {iterations} Newton iterations, |grad| = {gnorm:e}");
        stages.push(StageReport {
            rho,
            iterations,
            energy_start,
            energy_end: energy,
            gradient_norm: gnorm,
        });
    }
    Ok(VelocitySolution { w, stages })
}
