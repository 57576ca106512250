//! Linear and nonsmooth solvers for the two per-step problems.

mod box_qp;
mod cg;
mod velocity;

pub use box_qp::{projected_gradient_norm, solve_box_qp};
pub use cg::{cg_solve, pcg_solve_into, CgOutcome};
pub use velocity::{solve_velocity_step, velocity_energy, StageReport, VelocitySolution};

use crate::error::{Error, Result};

/// Stopping criteria and iteration caps shared by the solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverTolerances {
    /// Relative residual for conjugate gradients.
    pub cg_rel_tol: f64,
    pub cg_max_iters: usize,
    /// Projected-gradient norm relative to the right-hand side.
    pub qp_rel_tol: f64,
    pub qp_max_sweeps: usize,
    /// Relaxation factor of projected SOR.
    pub sor_omega: f64,
    /// Gradient tolerance of the velocity solver, scaled by `max(1, ‖rhs‖)`.
    pub newton_grad_tol: f64,
    /// Newton iterations per smoothing stage.
    pub newton_max_iters: usize,
    pub rho_start: f64,
    pub rho_final: f64,
    pub rho_factor: f64,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        SolverTolerances {
            cg_rel_tol: 1e-12,
            cg_max_iters: 100_000,
            qp_rel_tol: 1e-10,
            qp_max_sweeps: 1_000_000,
            sor_omega: 1.5,
            newton_grad_tol: 1e-9,
            newton_max_iters: 200,
            rho_start: 1e-2,
            rho_final: 1e-10,
            rho_factor: 10.0,
        }
    }
}

impl SolverTolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cg_rel_tol", self.cg_rel_tol),
            ("qp_rel_tol", self.qp_rel_tol),
            ("newton_grad_tol", self.newton_grad_tol),
            ("rho_start", self.rho_start),
            ("rho_final", self.rho_final),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return Err(Error::Config(format!("sor_omega = {} must lie in (0, 2)", self.sor_omega)));
        }
        if !(self.rho_factor > 1.0) {
            return Err(Error::Config(format!("rho_factor = {} must exceed 1", self.rho_factor)));
        }
        if self.rho_final > self.rho_start {
            return Err(Error::Config("rho_final must not exceed rho_start".into()));
        }
        if self.cg_max_iters == 0 || self.qp_max_sweeps == 0 || self.newton_max_iters == 0 {
            return Err(Error::Config("iteration caps must be positive".into()));
        }
        Ok(())
    }

    /// Smoothing parameters `rho_start, rho_start / factor, ...`, stopping at
    /// the first value not above `rho_final`.
    pub fn rho_schedule(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let rho = self.rho_start / self.rho_factor.powi(k);
            out.push(rho);
            if rho <= self.rho_final * (1.0 + 1e-9) {
                break;
            }
            k += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let s = SolverTolerances::default().rho_schedule();
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], 1e-2);
        assert!((s[8] - 1e-10).abs() < 1e-22);
    }

    #[test]
    fn invalid_tolerances() {
        let t = SolverTolerances {
            sor_omega: 2.5,
            ..Default::default()
        };
        assert!(t.validate().is_err());
        assert!(SolverTolerances::default().validate().is_ok());
    }
}
