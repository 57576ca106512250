//! Finite element assembly over P1 triangles.
//!
//! All strains of P1 fields are elementwise constant, so every volume
//! integral below is evaluated exactly in closed form. The damage inside the
//! elastic operator is taken at the barycenter, which is its elementwise
//! mean. Contact integrals use the 2-point Gauss rule on each edge.

use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::material::{apply_viscosity, damage_source, ElasticityLaw, MaterialParams};
use crate::mesh::{BoundaryTag, Mesh};
use crate::spaces::{Dof, DofMap, ElementTensorField, MeshKey, ScalarField, VectorField};
use crate::sparse::CsrMatrix;
use crate::tensor::SymTensor2;

/// Constant body force and constant traction on Γ2.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LoadSpec {
    pub body_force: [f64; 2],
    pub traction: [f64; 2],
}

impl LoadSpec {
    pub fn is_zero(&self) -> bool {
        self.body_force == [0.0, 0.0] && self.traction == [0.0, 0.0]
    }
}

/// Strain of the vector hat function `φ_k e_c` on a triangle.
fn basis_strain(grads: &[[f64; 2]; 3], k: usize, c: usize) -> SymTensor2 {
    let mut e = [0.0; 2];
    e[c] = 1.0;
    SymTensor2::sym_outer(e, grads[k])
}

fn local_dofs(mesh: &Mesh, dofs: &DofMap, t: usize) -> [Dof; 6] {
    let tri = mesh.triangles()[t];
    let mut out = [Dof::Fixed; 6];
    for k in 0..3 {
        for c in 0..2 {
            out[2 * k + c] = dofs.dof(tri[k], c);
        }
    }
    out
}

/// Element matrix `∫_T A ε(φ_a) : ε(φ_b)` in local ordering `(vertex, component)`.
pub fn viscosity_element_matrix(mesh: &Mesh, t: usize, params: &MaterialParams) -> [[f64; 6]; 6] {
    let grads = mesh.shape_gradients(t);
    let area = mesh.signed_area(t);
    let strains: Vec<SymTensor2> = (0..6).map(|a| basis_strain(&grads, a / 2, a % 2)).collect();
    let mut local = [[0.0; 6]; 6];
    for a in 0..6 {
        let stress = apply_viscosity(strains[a], params);
        for b in 0..6 {
            local[a][b] = area * stress.ddot(&strains[b]);
        }
    }
    local
}

/// Viscosity matrix over the free velocity unknowns.
pub fn assemble_viscosity(mesh: &Mesh, dofs: &DofMap, params: &MaterialParams) -> Result<CsrMatrix> {
    if dofs.num_free() == 0 {
        return Err(Error::Config("velocity space has no free unknowns".into()));
    }
    let mut triplets = Vec::with_capacity(36 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let local = viscosity_element_matrix(mesh, t, params);
        let map = local_dofs(mesh, dofs, t);
        for a in 0..6 {
            let Dof::Free(i) = map[a] else { continue };
            for b in 0..6 {
                if let Dof::Free(j) = map[b] {
                    triplets.push((i, j, local[a][b]));
                }
            }
        }
    }
    Ok(CsrMatrix::from_triplets(dofs.num_free(), triplets))
}

/// Elementwise elastic stress `B(ε(u), ζ)` with `ζ` at the barycenter.
pub fn elastic_stress(
    u: &VectorField,
    zeta: &ScalarField,
    mesh: &Mesh,
    params: &MaterialParams,
    law: &ElasticityLaw,
) -> Result<ElementTensorField> {
    check_field(u.mesh, mesh)?;
    check_field(zeta.mesh, mesh)?;
    let values = (0..mesh.num_triangles())
        .map(|t| law.stress(u.strain(mesh, t), zeta.barycentric_mean(mesh, t), params))
        .collect::<Result<Vec<_>>>()?;
    Ok(ElementTensorField {
        mesh: MeshKey::of(mesh),
        values,
    })
}

/// `r_i = (B(ε(u), ζ), ε(φ_i))_Q` over the free unknowns.
pub fn assemble_elastic_residual(
    u: &VectorField,
    zeta: &ScalarField,
    mesh: &Mesh,
    dofs: &DofMap,
    params: &MaterialParams,
    law: &ElasticityLaw,
) -> Result<Vec<f64>> {
    let stress = elastic_stress(u, zeta, mesh, params, law)?;
    Ok(assemble_stress_divergence(&stress, mesh, dofs))
}

/// `r_i = (σ, ε(φ_i))_Q` for an elementwise-constant stress.
pub fn assemble_stress_divergence(stress: &ElementTensorField, mesh: &Mesh, dofs: &DofMap) -> Vec<f64> {
    let mut r = vec![0.0; dofs.num_free()];
    for t in 0..mesh.num_triangles() {
        let sigma = stress.values[t];
        if sigma == SymTensor2::ZERO {
            continue;
        }
        let grads = mesh.shape_gradients(t);
        let area = mesh.signed_area(t);
        let map = local_dofs(mesh, dofs, t);
        for a in 0..6 {
            if let Dof::Free(i) = map[a] {
                r[i] += area * sigma.ddot(&basis_strain(&grads, a / 2, a % 2));
            }
        }
    }
    r
}

/// Load per vertex before constraint elimination: body force integrated
/// against each hat function plus traction over Γ2 edges.
pub fn assemble_load_nodal(spec: &LoadSpec, mesh: &Mesh) -> Vec<[f64; 2]> {
    let mut f = vec![[0.0; 2]; mesh.num_vertices()];
    if spec.body_force != [0.0, 0.0] {
        for t in 0..mesh.num_triangles() {
            let share = mesh.signed_area(t) / 3.0;
            for &v in &mesh.triangles()[t] {
                f[v][0] += share * spec.body_force[0];
                f[v][1] += share * spec.body_force[1];
            }
        }
    }
    if spec.traction != [0.0, 0.0] {
        for (e, edge) in mesh.boundary_edges().iter().enumerate() {
            if edge.tag != Some(BoundaryTag::Gamma2) {
                continue;
            }
            let share = 0.5 * mesh.edge_length(e);
            for &v in &edge.vertices {
                f[v][0] += share * spec.traction[0];
                f[v][1] += share * spec.traction[1];
            }
        }
    }
    f
}

pub fn assemble_load(spec: &LoadSpec, mesh: &Mesh, dofs: &DofMap) -> Vec<f64> {
    let nodal = assemble_load_nodal(spec, mesh);
    let mut out = vec![0.0; dofs.num_free()];
    for (v, f) in nodal.iter().enumerate() {
        for c in 0..2 {
            if let Dof::Free(i) = dofs.dof(v, c) {
                out[i] = f[c];
            }
        }
    }
    out
}

/// P1 mass matrix and `κ`-scaled stiffness matrix over all vertices.
#[derive(Clone, Debug)]
pub struct DamageOperators {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
}

pub fn assemble_damage_operators(mesh: &Mesh, params: &MaterialParams) -> DamageOperators {
    let n = mesh.num_vertices();
    let mut mass = Vec::with_capacity(9 * mesh.num_triangles());
    let mut stiff = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let tri = mesh.triangles()[t];
        let area = mesh.signed_area(t);
        let grads = mesh.shape_gradients(t);
        for a in 0..3 {
            for b in 0..3 {
                let m = if a == b { area / 6.0 } else { area / 12.0 };
                mass.push((tri[a], tri[b], m));
                let g = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                stiff.push((tri[a], tri[b], params.kappa * area * g));
            }
        }
    }
    DamageOperators {
        mass: CsrMatrix::from_triplets(n, mass),
        stiffness: CsrMatrix::from_triplets(n, stiff),
    }
}

/// `(φ(ε(u), ζ), ψ_i)_{Z0}` by vertex quadrature: each triangle contributes
/// `|T|/3 · φ(ε_T(u), ζ_i)` to its vertex `i`.
pub fn assemble_damage_source(
    u: &VectorField,
    zeta: &ScalarField,
    mesh: &Mesh,
    params: &MaterialParams,
) -> Result<Vec<f64>> {
    check_field(u.mesh, mesh)?;
    check_field(zeta.mesh, mesh)?;
    let mut b = vec![0.0; mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let eps = u.strain(mesh, t);
        let share = mesh.signed_area(t) / 3.0;
        for &v in &mesh.triangles()[t] {
            b[v] += share * damage_source(eps, zeta.values[v], params.source_floor);
        }
    }
    Ok(b)
}

/// One Gauss point on a contact edge. The tangential velocity there is
/// `Σ coeff · w[dof]` over the free tangential unknowns of the two endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactPoint {
    pub position: [f64; 2],
    pub weight: f64,
    pub terms: [(Option<usize>, f64); 2],
}

impl ContactPoint {
    pub fn tangential(&self, w: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(dof, c)| dof.map_or(0.0, |i| c * w[i]))
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContactQuadrature {
    pub points: Vec<ContactPoint>,
}

impl ContactQuadrature {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_Γ3 j(w_τ) da`.
    pub fn friction_integral(&self, model: &FrictionModel, w: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| p.weight * model.bound * p.tangential(w).abs())
            .sum()
    }

    /// `∫_Γ3 j⁰(w_τ; v_τ - w_τ) da`.
    pub fn clarke_integral(&self, model: &FrictionModel, w: &[f64], v: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| {
                let a = p.tangential(w);
                let b = p.tangential(v);
                p.weight * model.clarke_derivative([a, 0.0], [b - a, 0.0])
            })
            .sum()
    }

    /// `∫_Γ3 j_ρ(w_τ) da`.
    pub fn regularized_integral(&self, model: &FrictionModel, w: &[f64], rho: f64) -> f64 {
        self.points
            .iter()
            .map(|p| p.weight * model.regularized_scalar(p.tangential(w), rho).0)
            .sum()
    }
}

/// 2-point Gauss rule on every Γ3 edge.
pub fn gamma3_quadrature(mesh: &Mesh, dofs: &DofMap) -> ContactQuadrature {
    let offset = 0.5 / 3f64.sqrt();
    let mut points = Vec::with_capacity(2 * dofs.contact_edges().len());
    for edge in dofs.contact_edges() {
        let [a, b] = edge.vertices;
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        let c = edge.tangential_component;
        let sign = edge.tangent[c];
        for s in [0.5 - offset, 0.5 + offset] {
            points.push(ContactPoint {
                position: [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])],
                weight: 0.5 * edge.length,
                terms: [
                    (dofs.dof(a, c).index(), sign * (1.0 - s)),
                    (dofs.dof(b, c).index(), sign * s),
                ],
            });
        }
    }
    ContactQuadrature { points }
}

/// Norms used for error measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    /// `‖ε(w)‖_Q`.
    pub v: f64,
    /// `L²` norm of the damage.
    pub z0: f64,
    /// `H¹` seminorm of the damage.
    pub z_semi: f64,
}

pub fn v_norm(w: &VectorField, mesh: &Mesh) -> Result<f64> {
    check_field(w.mesh, mesh)?;
    Ok((0..mesh.num_triangles())
        .map(|t| mesh.signed_area(t) * w.strain(mesh, t).norm_squared())
        .sum::<f64>()
        .sqrt())
}

pub fn z0_norm(zeta: &ScalarField, mesh: &Mesh) -> Result<f64> {
    check_field(zeta.mesh, mesh)?;
    let mut s = 0.0;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangles()[t].map(|v| zeta.values[v]);
        // exact P1 mass form (|T|/12) [[2,1,1],[1,2,1],[1,1,2]]
        let q = a * a + b * b + c * c + a * b + b * c + c * a;
        s += mesh.signed_area(t) / 6.0 * q;
    }
    Ok(s.sqrt())
}

pub fn z_seminorm(zeta: &ScalarField, mesh: &Mesh) -> Result<f64> {
    check_field(zeta.mesh, mesh)?;
    Ok((0..mesh.num_triangles())
        .map(|t| {
            let g = zeta.gradient(mesh, t);
            mesh.signed_area(t) * (g[0] * g[0] + g[1] * g[1])
        })
        .sum::<f64>()
        .sqrt())
}

pub fn error_norms(w: &VectorField, zeta: &ScalarField, mesh: &Mesh) -> Result<ErrorNorms> {
    Ok(ErrorNorms {
        v: v_norm(w, mesh)?,
        z0: z0_norm(zeta, mesh)?,
        z_semi: z_seminorm(zeta, mesh)?,
    })
}

fn check_field(key: MeshKey, mesh: &Mesh) -> Result<()> {
    if key != MeshKey::of(mesh) {
        return Err(Error::MeshMismatch(format!(
            "field on {}x{} mesh evaluated on {}x{} mesh",
            key.nx,
            key.ny,
            mesh.nx(),
            mesh.ny()
        )));
    }
    Ok(())
}
