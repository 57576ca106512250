//! One velocity solve on the unit square with a frictional bottom edge:
//! the smoothing stages of the Newton iteration and the stick and slip
//! pattern that results as the applied traction grows.

use viscodamage::assembly::{assemble_load, assemble_viscosity, gamma3_quadrature, LoadSpec};
use viscodamage::config::{Scenario, SimConfig};
use viscodamage::friction::FrictionModel;
use viscodamage::solvers::{solve_velocity_step, SolverTolerances};
use viscodamage::spaces::DofMap;

pub fn run(_args: &[String]) -> viscodamage::Result<()> {
    let config = SimConfig::scenario(Scenario::Square).with_resolution(1.0 / 8.0, 1.0);
    let mesh = config.mesh()?;
    let dofs = DofMap::velocity(&mesh)?;
    let k = assemble_viscosity(&mesh, &dofs, &config.params)?;
    let contact = gamma3_quadrature(&mesh, &dofs);
    let friction = FrictionModel::default();
    let tol = SolverTolerances::default();
    for scale in [1.0, 10.0, 40.0] {
        let load = LoadSpec {
            body_force: [0.0, 0.0],
            traction: [-1.4 * scale, -0.2 * scale],
        };
        let rhs = assemble_load(&load, &mesh, &dofs);
        let sol = solve_velocity_step(&k, &rhs, &contact, &friction, None, &tol)?;
        let w = dofs.scatter(&mesh, &sol.w);
        let slip: Vec<String> = (0..=mesh.nx())
            .map(|i| if w.values[i][0].abs() > 1e-6 { "S" } else { "." }.to_string())
            .collect();
        println!("traction x{scale:>4}: bottom edge {}  ({} Newton iterations)", slip.join(""), sol.newton_iterations());
        if scale == 1.0 {
            for s in &sol.stages {
                println!("    rho = {:.0e}: {} iterations, energy {:.8} -> {:.8}", s.rho, s.iterations, s.energy_start, s.energy_end);
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
