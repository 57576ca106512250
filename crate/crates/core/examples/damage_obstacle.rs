//! The damage update on its own: a bound-constrained quadratic program
//! `min ½ ζᵀ(M/k + κK)ζ - bᵀζ` over `0 ≤ ζ ≤ 1`, here with a source that
//! pushes part of the domain below zero so the lower bound becomes active.

use viscodamage::assembly::assemble_damage_operators;
use viscodamage::material::MaterialParams;
use viscodamage::mesh::Mesh;
use viscodamage::solvers::{projected_gradient_norm, solve_box_qp, SolverTolerances};

pub fn run(_args: &[String]) -> viscodamage::Result<()> {
    let mesh = Mesh::structured(1.0, 1.0, 1.0 / 16.0)?;
    let ops = assemble_damage_operators(&mesh, &MaterialParams::default());
    let k = 0.05;
    let h = ops.mass.linear_combination(1.0 / k, &ops.stiffness, 1.0);
    // a strong local sink around (0.3, 0.3) plus mild growth elsewhere
    let target: Vec<f64> = mesh
        .vertices()
        .iter()
        .map(|p| if (p[0] - 0.3).hypot(p[1] - 0.3) < 0.2 { -40.0 } else { 30.0 })
        .collect();
    let b = ops.mass.matvec(&target);
    let zeta = solve_box_qp(&h, &b, 0.0, 1.0, &vec![1.0; mesh.num_vertices()], &SolverTolerances::default())?;
    let at_zero = zeta.iter().filter(|&&z| z == 0.0).count();
    let at_one = zeta.iter().filter(|&&z| z == 1.0).count();
    println!("{} nodes: {at_zero} at the lower bound, {at_one} at the upper bound", zeta.len());
    println!("projected gradient norm {:.3e}", projected_gradient_norm(&h, &b, &zeta, 0.0, 1.0));
    let row = 4 * (mesh.nx() + 1);
    print!("damage along y = 0.25:");
    for z in &zeta[row..row + mesh.nx() + 1] {
        print!(" {z:.2}");
    }
    println!();
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
