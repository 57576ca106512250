//! Discrete spaces: constrained P1 velocity/displacement fields, P1 damage
//! fields, piecewise-constant tensor fields, and transfer between nested
//! meshes.

use crate::error::{Error, Result};
use crate::mesh::{Axis, BoundaryTag, Mesh};
use crate::tensor::SymTensor2;

/// Identifies the mesh a field lives on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshKey {
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl MeshKey {
    pub fn of(mesh: &Mesh) -> Self {
        MeshKey {
            width: mesh.width(),
            height: mesh.height(),
            nx: mesh.nx(),
            ny: mesh.ny(),
        }
    }
}

fn check_key(key: MeshKey, mesh: &Mesh, what: &str) -> Result<()> {
    if key != MeshKey::of(mesh) {
        return Err(Error::MeshMismatch(format!(
            "{what} lives on a {}x{} mesh, got a {}x{} mesh",
            key.nx,
            key.ny,
            mesh.nx(),
            mesh.ny()
        )));
    }
    Ok(())
}

/// Nodal P1 scalar field (the damage).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub mesh: MeshKey,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn constant(mesh: &Mesh, c: f64) -> Self {
        ScalarField {
            mesh: MeshKey::of(mesh),
            values: vec![c; mesh.num_vertices()],
        }
    }

    pub fn interpolate(mesh: &Mesh, f: impl Fn([f64; 2]) -> f64) -> Self {
        ScalarField {
            mesh: MeshKey::of(mesh),
            values: mesh.vertices().iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::MeshMismatch(format!(
                "{} nodal values for {} vertices",
                values.len(),
                mesh.num_vertices()
            )));
        }
        Ok(ScalarField {
            mesh: MeshKey::of(mesh),
            values,
        })
    }

    /// Value at the barycenter of triangle `t`.
    pub fn barycentric_mean(&self, mesh: &Mesh, t: usize) -> f64 {
        let [a, b, c] = mesh.triangles()[t];
        (self.values[a] + self.values[b] + self.values[c]) / 3.0
    }

    pub fn gradient(&self, mesh: &Mesh, t: usize) -> [f64; 2] {
        let grads = mesh.shape_gradients(t);
        let tri = mesh.triangles()[t];
        let mut g = [0.0; 2];
        for (k, &v) in tri.iter().enumerate() {
            g[0] += self.values[v] * grads[k][0];
            g[1] += self.values[v] * grads[k][1];
        }
        g
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        if self.mesh != other.mesh {
            return Err(Error::MeshMismatch("scalar fields on different meshes".into()));
        }
        Ok(ScalarField {
            mesh: self.mesh,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }
}

/// Nodal P1 vector field (displacement or velocity).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub mesh: MeshKey,
    pub values: Vec<[f64; 2]>,
}

impl VectorField {
    pub fn zeros(mesh: &Mesh) -> Self {
        VectorField {
            mesh: MeshKey::of(mesh),
            values: vec![[0.0; 2]; mesh.num_vertices()],
        }
    }

    pub fn interpolate(mesh: &Mesh, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        VectorField {
            mesh: MeshKey::of(mesh),
            values: mesh.vertices().iter().map(|&p| f(p)).collect(),
        }
    }

    /// Constant strain of the field on triangle `t`.
    pub fn strain(&self, mesh: &Mesh, t: usize) -> SymTensor2 {
        let grads = mesh.shape_gradients(t);
        let tri = mesh.triangles()[t];
        let mut eps = SymTensor2::ZERO;
        for (k, &v) in tri.iter().enumerate() {
            eps = eps + SymTensor2::sym_outer(self.values[v], grads[k]);
        }
        eps
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        if self.mesh != other.mesh {
            return Err(Error::MeshMismatch("vector fields on different meshes".into()));
        }
        Ok(VectorField {
            mesh: self.mesh,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// One symmetric tensor per triangle (strain or stress in Q^h).
#[derive(Clone, Debug, PartialEq)]
pub struct ElementTensorField {
    pub mesh: MeshKey,
    pub values: Vec<SymTensor2>,
}

impl ElementTensorField {
    /// `(σ, τ)_Q = Σ_T |T| σ_T : τ_T`.
    pub fn inner(&self, other: &ElementTensorField, mesh: &Mesh) -> Result<f64> {
        check_key(self.mesh, mesh, "tensor field")?;
        check_key(other.mesh, mesh, "tensor field")?;
        Ok((0..mesh.num_triangles())
            .map(|t| mesh.signed_area(t) * self.values[t].ddot(&other.values[t]))
            .sum())
    }
}

/// Orthogonal projection onto elementwise constants. The integrand is
/// evaluated at each barycenter, which gives the exact elementwise mean for
/// integrands that are affine on every triangle.
pub fn project_qh(mesh: &Mesh, integrand: impl Fn(usize, [f64; 2]) -> SymTensor2) -> ElementTensorField {
    ElementTensorField {
        mesh: MeshKey::of(mesh),
        values: (0..mesh.num_triangles())
            .map(|t| integrand(t, mesh.barycenter(t)))
            .collect(),
    }
}

/// Status of one velocity component at one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dof {
    Free(usize),
    Fixed,
}

impl Dof {
    pub fn index(self) -> Option<usize> {
        match self {
            Dof::Free(i) => Some(i),
            Dof::Fixed => None,
        }
    }
}

/// A contact edge with its unit tangent (direction of travel along the
/// boundary) and the velocity component that carries the tangential motion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactEdge {
    pub vertices: [usize; 2],
    pub tangent: [f64; 2],
    pub tangential_component: usize,
    pub length: f64,
}

/// Free-index compression for the constrained velocity space: both
/// components vanish on Γ1, the normal component vanishes on Γ3.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    dofs: Vec<[Dof; 2]>,
    num_free: usize,
    contact_edges: Vec<ContactEdge>,
}

impl DofMap {
    pub fn velocity(mesh: &Mesh) -> Result<DofMap> {
        if !mesh.is_classified() {
            return Err(Error::Config("mesh boundary has not been classified".into()));
        }
        let mut fixed = vec![[false; 2]; mesh.num_vertices()];
        for (v, on) in mesh.vertices_on(BoundaryTag::Gamma1).into_iter().enumerate() {
            if on {
                fixed[v] = [true, true];
            }
        }

        let mut contact_edges = Vec::new();
        for (e, edge) in mesh.boundary_edges().iter().enumerate() {
            if edge.tag != Some(BoundaryTag::Gamma3) {
                continue;
            }
            let [a, b] = edge.vertices;
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let d = [pb[0] - pa[0], pb[1] - pa[1]];
            let length = mesh.edge_length(e);
            let axis = if d[1].abs() <= 1e-12 * length {
                Axis::Y
            } else if d[0].abs() <= 1e-12 * length {
                Axis::X
            } else {
                return Err(Error::UnsupportedGeometry(format!(
                    "contact edge {a}-{b} is not axis-aligned"
                )));
            };
            // the normal is the fixed coordinate direction
            let (normal_component, tangential_component) = match axis {
                Axis::Y => (1, 0),
                Axis::X => (0, 1),
            };
            fixed[a][normal_component] = true;
            fixed[b][normal_component] = true;
            contact_edges.push(ContactEdge {
                vertices: [a, b],
                tangent: [d[0] / length, d[1] / length],
                tangential_component,
                length,
            });
        }

        let mut num_free = 0;
        let dofs = fixed
            .iter()
            .map(|f| {
                let mut pair = [Dof::Fixed; 2];
                for c in 0..2 {
                    if !f[c] {
                        pair[c] = Dof::Free(num_free);
                        num_free += 1;
                    }
                }
                pair
            })
            .collect();

        Ok(DofMap {
            dofs,
            num_free,
            contact_edges,
        })
    }

    pub fn num_free(&self) -> usize {
        self.num_free
    }

    pub fn num_vertices(&self) -> usize {
        self.dofs.len()
    }

    pub fn dof(&self, vertex: usize, component: usize) -> Dof {
        self.dofs[vertex][component]
    }

    pub fn contact_edges(&self) -> &[ContactEdge] {
        &self.contact_edges
    }

    /// Restricts a nodal field to the free unknowns.
    pub fn gather(&self, field: &VectorField) -> Vec<f64> {
        let mut out = vec![0.0; self.num_free];
        for (v, pair) in self.dofs.iter().enumerate() {
            for c in 0..2 {
                if let Dof::Free(i) = pair[c] {
                    out[i] = field.values[v][c];
                }
            }
        }
        out
    }

    /// Expands free unknowns to a nodal field, zero on constrained components.
    pub fn scatter(&self, mesh: &Mesh, free: &[f64]) -> VectorField {
        let mut field = VectorField::zeros(mesh);
        for (v, pair) in self.dofs.iter().enumerate() {
            for c in 0..2 {
                if let Dof::Free(i) = pair[c] {
                    field.values[v][c] = free[i];
                }
            }
        }
        field
    }

    /// Zeroes every constrained component in place.
    pub fn constrain(&self, field: &mut VectorField) {
        for (v, pair) in self.dofs.iter().enumerate() {
            for c in 0..2 {
                if pair[c] == Dof::Fixed {
                    field.values[v][c] = 0.0;
                }
            }
        }
    }
}

fn check_nested(coarse: &Mesh, fine: &Mesh) -> Result<()> {
    if !fine.refines(coarse) {
        return Err(Error::NotNested(format!(
            "{}x{} mesh does not refine {}x{} mesh",
            fine.nx(),
            fine.ny(),
            coarse.nx(),
            coarse.ny()
        )));
    }
    Ok(())
}

fn locate_or_err(coarse: &Mesh, p: [f64; 2]) -> Result<(usize, [f64; 3])> {
    coarse
        .locate(p)
        .ok_or_else(|| Error::NotNested(format!("point ({}, {}) outside coarse mesh", p[0], p[1])))
}

/// Evaluates a coarse P1 scalar field at the vertices of a nested fine mesh.
/// On nested meshes the result is the same piecewise-linear function.
pub fn transfer_scalar(field: &ScalarField, coarse: &Mesh, fine: &Mesh) -> Result<ScalarField> {
    check_key(field.mesh, coarse, "scalar field")?;
    check_nested(coarse, fine)?;
    let mut values = Vec::with_capacity(fine.num_vertices());
    for &p in fine.vertices() {
        let (t, bary) = locate_or_err(coarse, p)?;
        let tri = coarse.triangles()[t];
        values.push((0..3).map(|k| bary[k] * field.values[tri[k]]).sum());
    }
    Ok(ScalarField {
        mesh: MeshKey::of(fine),
        values,
    })
}

pub fn transfer_vector(field: &VectorField, coarse: &Mesh, fine: &Mesh) -> Result<VectorField> {
    check_key(field.mesh, coarse, "vector field")?;
    check_nested(coarse, fine)?;
    let mut values = Vec::with_capacity(fine.num_vertices());
    for &p in fine.vertices() {
        let (t, bary) = locate_or_err(coarse, p)?;
        let tri = coarse.triangles()[t];
        let mut v = [0.0; 2];
        for k in 0..3 {
            v[0] += bary[k] * field.values[tri[k]][0];
            v[1] += bary[k] * field.values[tri[k]][1];
        }
        values.push(v);
    }
    Ok(VectorField {
        mesh: MeshKey::of(fine),
        values,
    })
}

/// Each fine triangle takes the value of the coarse triangle containing it.
pub fn transfer_tensor(
    field: &ElementTensorField,
    coarse: &Mesh,
    fine: &Mesh,
) -> Result<ElementTensorField> {
    check_key(field.mesh, coarse, "tensor field")?;
    check_nested(coarse, fine)?;
    let values = (0..fine.num_triangles())
        .map(|t| locate_or_err(coarse, fine.barycenter(t)).map(|(ct, _)| field.values[ct]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ElementTensorField {
        mesh: MeshKey::of(fine),
        values,
    })
}
