use crate::error::{Error, Result};
use crate::sparse::{axpy, dot, norm, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// Final `‖b - A x‖`.
    pub residual: f64,
}

/// Solves `A x = b` for symmetric positive definite `A`, starting from zero.
pub fn cg_solve(a: &CsrMatrix, b: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>> {
    let mut x = vec![0.0; b.len()];
    pcg_solve_into(a, b, &mut x, tol, max_iters)?;
    Ok(x)
}

/// Jacobi-preconditioned conjugate gradients from the initial guess in `x`.
/// Stops when `‖b - A x‖ ≤ tol ‖b‖`, or when the residual has reached the
/// level that rounding in `A x` alone produces, which can be larger for
/// small right-hand sides.
pub fn pcg_solve_into(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iters: usize) -> Result<CgOutcome> {
    let n = b.len();
    assert_eq!(a.dim(), n, "matrix and right-hand side sizes differ");
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome {
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = tol * b_norm;
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = a.matvec(x);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut res = norm(&r);
    if res <= target {
        return Ok(CgOutcome {
            iterations: 0,
            residual: res,
        });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for it in 1..=max_iters {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NonConvergence {
                solver: "conjugate gradients (matrix not positive definite)",
                iterations: it,
                residual: res,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        res = norm(&r);
        if res <= target {
            // guard against drift of the recursive residual
            let mut true_r = a.matvec(x);
            for i in 0..n {
                true_r[i] = b[i] - true_r[i];
            }
            let true_res = norm(&true_r);
            if true_res <= target.max(rounding_floor(a, x, b)) {
                return Ok(CgOutcome {
                    iterations: it,
                    residual: true_res,
                });
            }
            r = true_r;
            res = true_res;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        solver: "conjugate gradients",
        iterations: max_iters,
        residual: res,
    })
}

/// `64 ε ‖ |A| |x| + |b| ‖`, a bound on the residual noise of one product.
fn rounding_floor(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.dim() {
        let row: f64 = a.row(i).map(|(j, v)| (v * x[j]).abs()).sum::<f64>() + b[i].abs();
        s += row * row;
    }
    64.0 * f64::EPSILON * s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let b = vec![1.0, -2.0, 3.5];
        let x = cg_solve(&CsrMatrix::identity(3), &b, 1e-12, 10).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0]);
        let x = cg_solve(&a, &[2.0, 8.0], 1e-12, 10).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_rhs() {
        let a = CsrMatrix::identity(4);
        let mut x = vec![1.0; 4];
        pcg_solve_into(&a, &[0.0; 4], &mut x, 1e-12, 10).unwrap();
        assert_eq!(x, vec![0.0; 4]);
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let err = cg_solve(&a, &vec![1.0; n], 1e-14, 2).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 2, .. }));
    }
}
