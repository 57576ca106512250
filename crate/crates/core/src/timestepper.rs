//! Backward Euler time stepping. Each step solves the velocity problem with
//! the elastic stress and damage source lagged at the previous step, then
//! updates displacement and damage.

use crate::assembly::{
    assemble_damage_operators, assemble_damage_source, assemble_load, assemble_stress_divergence,
    assemble_viscosity, elastic_stress, gamma3_quadrature, v_norm, ContactQuadrature, LoadSpec,
};
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::material::{apply_viscosity, ElasticityLaw, MaterialParams};
use crate::mesh::Mesh;
use crate::solvers::{solve_box_qp, solve_velocity_step, SolverTolerances};
use crate::spaces::{DofMap, ElementTensorField, MeshKey, ScalarField, VectorField};
use crate::sparse::CsrMatrix;

/// Material, friction and load data of one simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProblemData {
    pub params: MaterialParams,
    pub law: ElasticityLaw,
    pub friction: FrictionModel,
    pub load: LoadSpec,
}

/// Uniform partition of `[0, final_time]` into `steps` intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub final_time: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(final_time: f64, steps: usize) -> Result<Self> {
        if !(final_time.is_finite() && final_time > 0.0) {
            return Err(Error::Config(format!("final time {final_time} must be positive")));
        }
        if steps == 0 {
            return Err(Error::Config("number of time steps must be positive".into()));
        }
        Ok(TimeGrid { final_time, steps })
    }

    /// Time step for a given `k`; `final_time / k` must be an integer.
    pub fn with_step(final_time: f64, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Config(format!("time step {k} must be positive")));
        }
        let ratio = final_time / k;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "time step {k} does not divide the final time {final_time}"
            )));
        }
        Self::new(final_time, steps as usize)
    }

    pub fn k(&self) -> f64 {
        self.final_time / self.steps as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.steps {
            self.final_time
        } else {
            n as f64 * self.k()
        }
    }
}

/// Discrete fields at time `t_n`. The stress is unset at `n = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeState {
    pub step: usize,
    pub time: f64,
    pub u: VectorField,
    pub w: VectorField,
    pub zeta: ScalarField,
    pub stress: Option<ElementTensorField>,
}

/// Scalar diagnostics recorded after every step.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub time: f64,
    pub min_zeta: f64,
    pub max_zeta: f64,
    pub norm_w_v: f64,
}

/// Which states [`Simulation::run`] keeps in memory. The initial and final
/// states are always kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SnapshotPolicy {
    #[default]
    Final,
    All,
    Every(usize),
}

impl SnapshotPolicy {
    fn keeps(self, step: usize, last: usize) -> bool {
        step == 0
            || step == last
            || match self {
                SnapshotPolicy::Final => false,
                SnapshotPolicy::All => true,
                SnapshotPolicy::Every(m) => m > 0 && step % m == 0,
            }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationRun {
    pub snapshots: Vec<TimeState>,
    pub history: Vec<StepSummary>,
}

impl SimulationRun {
    pub fn final_state(&self) -> &TimeState {
        self.snapshots.last().expect("a run keeps its final state")
    }

    pub fn initial_state(&self) -> &TimeState {
        &self.snapshots[0]
    }
}

/// Assembled time-independent operators for one mesh and time step.
#[derive(Debug)]
pub struct Simulation {
    mesh: Mesh,
    dofs: DofMap,
    data: ProblemData,
    grid: TimeGrid,
    tol: SolverTolerances,
    viscosity: CsrMatrix,
    load: Vec<f64>,
    contact: ContactQuadrature,
    /// `M / k`.
    scaled_mass: CsrMatrix,
    /// `M / k + κ K`.
    damage_matrix: CsrMatrix,
}

impl Simulation {
    /// `mesh` must have classified boundary edges.
    pub fn new(mesh: Mesh, data: ProblemData, grid: TimeGrid, tol: SolverTolerances) -> Result<Self> {
        data.params.validate()?;
        tol.validate()?;
        if !mesh.is_classified() {
            return Err(Error::Config("mesh boundary has not been classified".into()));
        }
        let dofs = DofMap::velocity(&mesh)?;
        let viscosity = assemble_viscosity(&mesh, &dofs, &data.params)?;
        let load = assemble_load(&data.load, &mesh, &dofs);
        let contact = gamma3_quadrature(&mesh, &dofs);
        let ops = assemble_damage_operators(&mesh, &data.params);
        let inv_k = 1.0 / grid.k();
        let damage_matrix = ops.mass.linear_combination(inv_k, &ops.stiffness, 1.0);
        let scaled_mass = ops.mass.scaled(inv_k);
        Ok(Simulation {
            mesh,
            dofs,
            data,
            grid,
            tol,
            viscosity,
            load,
            contact,
            scaled_mass,
            damage_matrix,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn data(&self) -> &ProblemData {
        &self.data
    }

    pub fn tolerances(&self) -> &SolverTolerances {
        &self.tol
    }

    pub fn viscosity_matrix(&self) -> &CsrMatrix {
        &self.viscosity
    }

    pub fn contact(&self) -> &ContactQuadrature {
        &self.contact
    }

    /// Interpolates the initial data. Displacement values that violate the
    /// kinematic constraints are overwritten and damage is clamped to
    /// `[0, 1]`, each with a warning.
    pub fn initial_state(
        &self,
        u0: impl Fn([f64; 2]) -> [f64; 2],
        zeta0: impl Fn([f64; 2]) -> f64,
    ) -> Result<TimeState> {
        let mut u = VectorField::interpolate(&self.mesh, u0);
        if u.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("initial displacement is not finite".into()));
        }
        let before = u.clone();
        self.dofs.constrain(&mut u);
        if before != u {
            log::warn!("initial displacement violated the kinematic constraints and was projected");
        }
        let mut zeta = ScalarField::interpolate(&self.mesh, zeta0);
        if zeta.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("initial damage is not finite".into()));
        }
        if zeta.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            log::warn!("initial damage outside [0, 1] was clamped");
            zeta.values.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        }
        Ok(TimeState {
            step: 0,
            time: 0.0,
            u,
            w: VectorField::zeros(&self.mesh),
            zeta,
            stress: None,
        })
    }

    /// Zero displacement and constant damage.
    pub fn constant_initial_state(&self, zeta0: f64) -> Result<TimeState> {
        self.initial_state(|_| [0.0, 0.0], |_| zeta0)
    }

    /// Advances `prev` by one time step.
    pub fn step(&self, prev: &TimeState) -> Result<TimeState> {
        let n = prev.step + 1;
        self.step_inner(prev).map_err(|e| Error::Step {
            step: n,
            source: Box::new(e),
        })
    }

    fn step_inner(&self, prev: &TimeState) -> Result<TimeState> {
        let key = MeshKey::of(&self.mesh);
        if prev.u.mesh != key || prev.w.mesh != key || prev.zeta.mesh != key {
            return Err(Error::MeshMismatch("state does not live on the simulation mesh".into()));
        }
        if prev.step >= self.grid.steps {
            return Err(Error::InvalidInput(format!(
                "state is already at the final step {}",
                self.grid.steps
            )));
        }
        let n = prev.step + 1;
        let k = self.grid.k();
        let p = &self.data.params;

        let elastic = elastic_stress(&prev.u, &prev.zeta, &self.mesh, p, &self.data.law)?;
        let residual = assemble_stress_divergence(&elastic, &self.mesh, &self.dofs);
        let rhs: Vec<f64> = self.load.iter().zip(&residual).map(|(f, r)| f - r).collect();
        let warm = self.dofs.gather(&prev.w);
        let velocity = solve_velocity_step(
            &self.viscosity,
            &rhs,
            &self.contact,
            &self.data.friction,
            Some(&warm),
            &self.tol,
        )?;
        let w = self.dofs.scatter(&self.mesh, &velocity.w);

        let mut u = prev.u.clone();
        for (ui, wi) in u.values.iter_mut().zip(&w.values) {
            ui[0] += k * wi[0];
            ui[1] += k * wi[1];
        }

        let source = assemble_damage_source(&prev.u, &prev.zeta, &self.mesh, p)?;
        let mut b = self.scaled_mass.matvec(&prev.zeta.values);
        for (bi, si) in b.iter_mut().zip(&source) {
            *bi += si;
        }
        let zeta_values = solve_box_qp(&self.damage_matrix, &b, 0.0, 1.0, &prev.zeta.values, &self.tol)?;
        let zeta = ScalarField::from_values(&self.mesh, zeta_values)?;

        let stress_values = (0..self.mesh.num_triangles())
            .map(|t| apply_viscosity(w.strain(&self.mesh, t), p) + elastic.values[t])
            .collect();
        Ok(TimeState {
            step: n,
            time: self.grid.time(n),
            u,
            w,
            zeta,
            stress: Some(ElementTensorField {
                mesh: key,
                values: stress_values,
            }),
        })
    }

    pub fn summarize(&self, state: &TimeState) -> Result<StepSummary> {
        Ok(StepSummary {
            step: state.step,
            time: state.time,
            min_zeta: state.zeta.min(),
            max_zeta: state.zeta.max(),
            norm_w_v: v_norm(&state.w, &self.mesh)?,
        })
    }

    /// Runs all remaining steps, handing every state (including `initial`)
    /// to `observe`, and returns the final state.
    pub fn run_with(
        &self,
        initial: TimeState,
        mut observe: impl FnMut(&TimeState) -> Result<()>,
    ) -> Result<TimeState> {
        observe(&initial)?;
        let mut state = initial;
        while state.step < self.grid.steps {
            state = self.step(&state)?;
            log::debug!(
                "step {} / {}: damage in [{:.6}, {:.6}]",
                state.step,
                self.grid.steps,
                state.zeta.min(),
                state.zeta.max()
            );
            observe(&state)?;
        }
        Ok(state)
    }

    pub fn run(&self, initial: TimeState, policy: SnapshotPolicy) -> Result<SimulationRun> {
        let last = self.grid.steps;
        let mut snapshots = Vec::new();
        let mut history = Vec::with_capacity(last + 1);
        let final_state = self.run_with(initial, |s| {
            history.push(self.summarize(s)?);
            if s.step != last && policy.keeps(s.step, last) {
                snapshots.push(s.clone());
            }
            Ok(())
        })?;
        snapshots.push(final_state);
        Ok(SimulationRun { snapshots, history })
    }
}
