//! Bound-constrained quadratic programs `min ½ xᵀHx - bᵀx` over
//! `lower ≤ x ≤ upper`, solved by projected successive over-relaxation.

use super::SolverTolerances;
use crate::error::{Error, Result};
use crate::sparse::{norm, CsrMatrix};

/// Norm of the projected gradient, which vanishes exactly at the minimizer.
pub fn projected_gradient_norm(h: &CsrMatrix, b: &[f64], x: &[f64], lower: f64, upper: f64) -> f64 {
    let hx = h.matvec(x);
    let mut s = 0.0;
    for i in 0..x.len() {
        let g = hx[i] - b[i];
        let pg = if x[i] <= lower {
            g.min(0.0)
        } else if x[i] >= upper {
            g.max(0.0)
        } else {
            g
        };
        s += pg * pg;
    }
    s.sqrt()
}

/// `H` must be symmetric with a positive diagonal. The iterate starts from
/// `warm` clamped into the box, and every iterate satisfies the bounds
/// exactly. Stops once the projected gradient is below `qp_rel_tol ‖b‖`.
pub fn solve_box_qp(
    h: &CsrMatrix,
    b: &[f64],
    lower: f64,
    upper: f64,
    warm: &[f64],
    tol: &SolverTolerances,
) -> Result<Vec<f64>> {
    let n = b.len();
    if h.dim() != n || warm.len() != n {
        return Err(Error::InvalidInput("box QP operands have inconsistent sizes".into()));
    }
    if !(lower <= upper) {
        return Err(Error::InvalidInput(format!("empty box [{lower}, {upper}]")));
    }
    let diag = h.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::InvalidInput(format!("box QP diagonal entry {i} is not positive")));
    }
    let mut x: Vec<f64> = warm.iter().map(|v| v.clamp(lower, upper)).collect();
    let initial = projected_gradient_norm(h, b, &x, lower, upper);
    let reference = if norm(b) > 0.0 { norm(b) } else { initial };
    let target = tol.qp_rel_tol * reference;
    if initial <= target {
        return Ok(x);
    }
    let omega = tol.sor_omega;
    let check_every = 5;
    let mut residual = initial;
    for sweep in 1..=tol.qp_max_sweeps {
        for i in 0..n {
            let mut r = b[i];
            for (j, v) in h.row(i) {
                if j != i {
                    r -= v * x[j];
                }
            }
            let gs = r / diag[i];
            x[i] = (x[i] + omega * (gs - x[i])).clamp(lower, upper);
        }
        if sweep % check_every == 0 {
            residual = projected_gradient_norm(h, b, &x, lower, upper);
            if residual <= target {
                return Ok(x);
            }
        }
    }
    Err(Error::NonConvergence {
        solver: "projected SOR",
        iterations: tol.qp_max_sweeps,
        residual,
    })
}
