//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::rngs::StdRng;
use rand::Rng;
use viscodamage::assembly::{assemble_viscosity, gamma3_quadrature, ContactQuadrature, LoadSpec};
use viscodamage::friction::FrictionModel;
use viscodamage::material::MaterialParams;
use viscodamage::mesh::{BoundarySegment, BoundarySpec, BoundaryTag, Mesh};
use viscodamage::solvers::SolverTolerances;
use viscodamage::spaces::DofMap;
use viscodamage::sparse::{dot, CsrMatrix};
use viscodamage::timestepper::{ProblemData, Simulation, TimeGrid, TimeState};

pub fn random_spd(n: usize, rng: &mut StdRng, density: f64) -> CsrMatrix {
    let mut t = Vec::new();
    let mut diag = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            if rng.gen::<f64>() < density {
                let v: f64 = rng.gen_range(-1.0..1.0);
                t.push((i, j, v));
                t.push((j, i, v));
                diag[i] += v.abs();
                diag[j] += v.abs();
            }
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        t.push((i, i, d + rng.gen_range(0.1..2.0)));
    }
    CsrMatrix::from_triplets(n, t)
}

pub fn dense(a: &CsrMatrix) -> DMatrix<f64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| a.get(i, j))
}

pub fn qp_objective(h: &DMatrix<f64>, b: &[f64], x: &[f64]) -> f64 {
    let xv = DVector::from_column_slice(x);
    0.5 * xv.dot(&(h * &xv)) - xv.dot(&DVector::from_column_slice(b))
}

/// Exact minimizer of `½ xᵀHx - bᵀx` on a box by enumerating which
/// coordinates sit at a bound.
pub fn enumerate_box_qp(h: &DMatrix<f64>, b: &[f64], lower: f64, upper: f64) -> Vec<f64> {
    let n = b.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let mut x: Vec<f64> = state
            .iter()
            .map(|s| match s {
                1 => lower,
                2 => upper,
                _ => 0.0,
            })
            .collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();
        if !free.is_empty() {
            let m = free.len();
            let sub = DMatrix::from_fn(m, m, |a, c| h[(free[a], free[c])]);
            let rhs = DVector::from_fn(m, |a, _| {
                let i = free[a];
                b[i] - (0..n).filter(|&j| state[j] != 0).map(|j| h[(i, j)] * x[j]).sum::<f64>()
            });
            let sol = sub.cholesky().expect("SPD subsystem").solve(&rhs);
            for (a, &i) in free.iter().enumerate() {
                x[i] = sol[a];
            }
        }
        if x.iter().all(|&v| v >= lower - 1e-12 && v <= upper + 1e-12) {
            let f = qp_objective(h, b, &x);
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, x));
            }
        }
    }
    best.expect("the box is non-empty").1
}

pub struct SquareProblem {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub k: CsrMatrix,
    pub contact: ContactQuadrature,
}

pub fn square_spec() -> BoundarySpec {
    BoundarySpec::new(vec![
        BoundarySegment::vertical(0.0, 0.0, 1.0, BoundaryTag::Gamma1),
        BoundarySegment::vertical(1.0, 0.0, 1.0, BoundaryTag::Gamma2),
        BoundarySegment::horizontal(1.0, 0.0, 1.0, BoundaryTag::Gamma2),
        BoundarySegment::horizontal(0.0, 0.0, 1.0, BoundaryTag::Gamma3),
    ])
    .unwrap()
}

pub fn square_problem(h: f64) -> SquareProblem {
    let mesh = Mesh::structured(1.0, 1.0, h).unwrap().classify_boundary(&square_spec()).unwrap();
    let dofs = DofMap::velocity(&mesh).unwrap();
    SquareProblem {
        k: assemble_viscosity(&mesh, &dofs, &MaterialParams::default()).unwrap(),
        contact: gamma3_quadrature(&mesh, &dofs),
        mesh,
        dofs,
    }
}

/// Velocity problem solved through its dual: minimize
/// `½ (r - Bᵀμ)ᵀ K⁻¹ (r - Bᵀμ)` over `|μ_g| ≤ c_g` by accelerated projected
/// gradient, then `w = K⁻¹ (r - Bᵀμ)`.
pub fn dual_velocity_oracle(k: &CsrMatrix, contact: &ContactQuadrature, model: &FrictionModel, r: &[f64]) -> Vec<f64> {
    let n = r.len();
    let chol = dense(k).cholesky().unwrap();
    let m = contact.points.len();
    let mut bmat = DMatrix::zeros(m, n);
    for (g, pt) in contact.points.iter().enumerate() {
        for &(dof, c) in &pt.terms {
            if let Some(i) = dof {
                bmat[(g, i)] += c;
            }
        }
    }
    let caps: Vec<f64> = contact.points.iter().map(|pt| pt.weight * model.bound).collect();
    let schur = &bmat * chol.solve(&bmat.transpose());
    let lip = schur.symmetric_eigenvalues().amax();
    let rv = DVector::from_column_slice(r);
    let w_of = |mu: &DVector<f64>| chol.solve(&(&rv - bmat.transpose() * mu));
    let mut mu = DVector::zeros(m);
    let mut prev = DVector::zeros(m);
    for it in 0..200_000 {
        let beta = it as f64 / (it as f64 + 3.0);
        let y = &mu + (&mu - &prev) * beta;
        let grad = -(&bmat * w_of(&y));
        prev = mu.clone();
        mu = y - grad / lip;
        for g in 0..m {
            mu[g] = mu[g].clamp(-caps[g], caps[g]);
        }
        if it > 100 && (&mu - &prev).amax() < 1e-15 * caps[0] {
            break;
        }
    }
    w_of(&mu).as_slice().to_vec()
}

pub fn exact_energy(k: &CsrMatrix, contact: &ContactQuadrature, model: &FrictionModel, r: &[f64], w: &[f64]) -> f64 {
    0.5 * k.quadratic_form(w) - dot(r, w) + contact.friction_integral(model, w)
}

// ---------------------------------------------------------------------------
// One full time step on the unit square split into two triangles, written
// with dense matrices and Voigt vectors (xx, yy, xy).

pub const POINTS: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
pub const TRIANGLES: [[usize; 3]; 2] = [[0, 1, 3], [0, 3, 2]];

type Voigt = [f64; 3];

fn inner(a: Voigt, b: Voigt) -> f64 {
    a[0] * b[0] + a[1] * b[1] + 2.0 * a[2] * b[2]
}

fn visc(e: Voigt) -> Voigt {
    let tr = e[0] + e[1];
    [4.0 * e[0] + 2.0 * tr, 4.0 * e[1] + 2.0 * tr, 4.0 * e[2]]
}

fn elast(e: Voigt, z: f64) -> Voigt {
    let tr = e[0] + e[1];
    [z * (8.0 * e[0] + 4.0 * tr), z * (8.0 * e[1] + 4.0 * tr), z * 8.0 * e[2]]
}

fn source(e: Voigt, z: f64) -> f64 {
    let n2 = inner(e, e);
    if z >= 0.2 {
        2.0 * (1.0 - z) / z - 20.0 * n2
    } else {
        8.0 - 20.0 * n2
    }
}

/// Area and hat-function gradients of a triangle.
fn geometry(t: usize) -> (f64, [[f64; 2]; 3]) {
    let [a, b, c] = TRIANGLES[t].map(|v| POINTS[v]);
    let jac = Matrix2::new(b[0] - a[0], c[0] - a[0], b[1] - a[1], c[1] - a[1]);
    let inv_t = jac.try_inverse().unwrap().transpose();
    let g1 = inv_t * Vector2::new(1.0, 0.0);
    let g2 = inv_t * Vector2::new(0.0, 1.0);
    let g0 = -(g1 + g2);
    (0.5 * jac.determinant().abs(), [[g0.x, g0.y], [g1.x, g1.y], [g2.x, g2.y]])
}

/// Strain of the vector field with vertex values `u` on triangle `t`.
fn strain(t: usize, u: &[[f64; 2]; 4]) -> Voigt {
    let (_, g) = geometry(t);
    let mut du = [[0.0; 2]; 2];
    for (k, &v) in TRIANGLES[t].iter().enumerate() {
        for c in 0..2 {
            for d in 0..2 {
                du[c][d] += u[v][c] * g[k][d];
            }
        }
    }
    [du[0][0], du[1][1], 0.5 * (du[0][1] + du[1][0])]
}

/// Strain of the basis field for global unknown `dof = 2 v + c`.
fn basis_strain(t: usize, dof: usize) -> Voigt {
    let mut u = [[0.0; 2]; 4];
    u[dof / 2][dof % 2] = 1.0;
    strain(t, &u)
}

pub struct DenseStep {
    pub w: [[f64; 2]; 4],
    pub u: [[f64; 2]; 4],
    pub zeta: [f64; 4],
    pub stress: [Voigt; 2],
    /// Tangential velocity at the contact vertex (1, 0).
    pub slip: f64,
}

/// Brute-force step: left edge clamped, bottom edge in frictional contact
/// with bound 20, top and right loaded by `traction`.
pub fn dense_step(u0: [[f64; 2]; 4], zeta0: [f64; 4], load: LoadSpec, k: f64) -> DenseStep {
    // free unknowns: x of vertex 1, both components of vertex 3
    let free = [2usize, 6, 7];
    let kd = DMatrix::from_fn(3, 3, |i, j| {
        (0..2)
            .map(|t| geometry(t).0 * inner(visc(basis_strain(t, free[i])), basis_strain(t, free[j])))
            .sum()
    });
    let mut load_full = [0.0; 8];
    for t in 0..2 {
        let area = geometry(t).0;
        for &v in &TRIANGLES[t] {
            for c in 0..2 {
                load_full[2 * v + c] += area / 3.0 * load.body_force[c];
            }
        }
    }
    for edge in [[2usize, 3], [1, 3]] {
        for v in edge {
            for c in 0..2 {
                load_full[2 * v + c] += 0.5 * load.traction[c];
            }
        }
    }
    let mean_zeta: [f64; 2] = [0, 1].map(|t| TRIANGLES[t].iter().map(|&v| zeta0[v]).sum::<f64>() / 3.0);
    let elastic: [Voigt; 2] = [0, 1].map(|t| elast(strain(t, &u0), mean_zeta[t]));
    let r = DVector::from_fn(3, |i, _| {
        load_full[free[i]] - (0..2).map(|t| geometry(t).0 * inner(elastic[t], basis_strain(t, free[i]))).sum::<f64>()
    });

    // ½ wᵀKw - rᵀw + 10 |w_0|: try stick, then both slip directions
    let chol = kd.clone().cholesky().unwrap();
    let stick = {
        let sub = kd.view((1, 1), (2, 2)).clone_owned();
        let s = sub.cholesky().unwrap().solve(&r.rows(1, 2).clone_owned());
        DVector::from_vec(vec![0.0, s[0], s[1]])
    };
    let residual0 = r[0] - (kd.row(0) * &stick)[0];
    let w_free = if residual0.abs() <= 10.0 {
        stick
    } else {
        let sign = residual0.signum();
        let mut shifted = r.clone();
        shifted[0] -= 10.0 * sign;
        let w = chol.solve(&shifted);
        assert!(w[0] * sign > 0.0, "slip direction must agree with the sign of the residual");
        w
    };
    let mut w = [[0.0; 2]; 4];
    for (i, &d) in free.iter().enumerate() {
        w[d / 2][d % 2] = w_free[i];
    }
    let mut u = u0;
    for v in 0..4 {
        for c in 0..2 {
            u[v][c] += k * w[v][c];
        }
    }

    let mut m = DMatrix::zeros(4, 4);
    let mut s = DMatrix::zeros(4, 4);
    let mut phi = [0.0; 4];
    for t in 0..2 {
        let (area, g) = geometry(t);
        let eps = strain(t, &u0);
        for a in 0..3 {
            let va = TRIANGLES[t][a];
            phi[va] += area / 3.0 * source(eps, zeta0[va]);
            for b in 0..3 {
                let vb = TRIANGLES[t][b];
                m[(va, vb)] += area / 12.0 * if a == b { 2.0 } else { 1.0 };
                s[(va, vb)] += 0.5 * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            }
        }
    }
    let h = &m / k + &s;
    let mz = &m * DVector::from_column_slice(&zeta0) / k;
    let b: Vec<f64> = (0..4).map(|i| mz[i] + phi[i]).collect();
    let z = enumerate_box_qp(&h, &b, 0.0, 1.0);

    let stress: [Voigt; 2] = [0, 1].map(|t| {
        let v = visc(strain(t, &w));
        [v[0] + elastic[t][0], v[1] + elastic[t][1], v[2] + elastic[t][2]]
    });
    DenseStep {
        w,
        u,
        zeta: [z[0], z[1], z[2], z[3]],
        stress,
        slip: w[1][0],
    }
}

pub fn initial_displacement(p: [f64; 2]) -> [f64; 2] {
    [0.02 * p[0] * (1.0 + p[1]), 0.03 * p[0] * p[1]]
}

pub fn initial_damage(p: [f64; 2]) -> f64 {
    0.9 - 0.8 * p[0] * p[1] + 0.05 * p[1]
}

/// One library step on the same two-triangle problem.
pub fn library_step(load: LoadSpec, k: f64) -> (Simulation, TimeState) {
    let mesh = Mesh::structured(1.0, 1.0, 1.0).unwrap().classify_boundary(&square_spec()).unwrap();
    assert_eq!(mesh.triangles(), &TRIANGLES);
    let data = ProblemData {
        load,
        ..Default::default()
    };
    let steps = (1.0 / k).round() as usize;
    let sim = Simulation::new(mesh, data, TimeGrid::new(1.0, steps).unwrap(), SolverTolerances::default()).unwrap();
    let init = sim.initial_state(initial_displacement, initial_damage).unwrap();
    let next = sim.step(&init).unwrap();
    (sim, next)
}

/// Largest deviation between the library step and the dense step.
pub fn two_triangle_discrepancy(load: LoadSpec, k: f64) -> (f64, DenseStep) {
    let u0 = POINTS.map(initial_displacement);
    let zeta0 = POINTS.map(initial_damage);
    let oracle = dense_step(u0, zeta0, load, k);
    let (_, state) = library_step(load, k);
    let mut diff = 0.0f64;
    for v in 0..4 {
        for c in 0..2 {
            diff = diff.max((state.w.values[v][c] - oracle.w[v][c]).abs());
            diff = diff.max((state.u.values[v][c] - oracle.u[v][c]).abs());
        }
        diff = diff.max((state.zeta.values[v] - oracle.zeta[v]).abs());
    }
    let stress = state.stress.as_ref().unwrap();
    for t in 0..2 {
        let s = stress.values[t];
        for (a, b) in [s.xx, s.yy, s.xy].iter().zip(oracle.stress[t]) {
            diff = diff.max((a - b).abs());
        }
    }
    (diff, oracle)
}

/// Loads for which the contact vertex slips, so the smoothing of the
/// friction term has no visible effect.
pub fn slipping_loads() -> Vec<LoadSpec> {
    vec![
        LoadSpec {
            body_force: [0.0, -1.0],
            traction: [-30.0, 0.0],
        },
        LoadSpec {
            body_force: [2.0, 0.5],
            traction: [25.0, -3.0],
        },
    ]
}
