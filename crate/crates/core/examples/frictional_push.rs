//! A traction pushes the plate down and to the left while its whole bottom
//! edge is held by a frictional foundation. Prints the stick and slip parts
//! of the contact zone and where damage grows.
//!
//!     cargo run --release --example frictional_push -- [m] [out_dir]

use std::path::Path;

use viscodamage::config::SimConfig;
use viscodamage::output::run_experiment;

pub fn run(args: &[String]) -> viscodamage::Result<()> {
    let m: f64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(16.0);
    let config = SimConfig::experiment("3")?.with_resolution(1.0 / m, 1.0 / m);
    let sim = config.simulation()?;
    let run = match args.get(1) {
        Some(dir) => run_experiment(&config, Path::new(dir))?.run,
        None => sim.run(config.initial_state(&sim)?, Default::default())?,
    };
    let last = run.final_state();
    let mesh = sim.mesh();
    let nx = mesh.nx();
    let slipping = (0..=nx).filter(|&i| last.w.values[i][0].abs() > 1e-6).count();
    println!("h = k = 1/{m}");
    println!("contact nodes slipping at t = 1: {slipping} of {}", nx + 1);
    let quadrant = |x0: f64, y0: f64| {
        let v: Vec<f64> = mesh
            .vertices()
            .iter()
            .zip(&last.zeta.values)
            .filter(|(p, _)| p[0] >= x0 && p[0] <= x0 + 1.0 && p[1] >= y0 && p[1] <= y0 + 0.5)
            .map(|(_, &z)| z)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    println!("mean damage field by region (1 = undamaged):");
    println!("  upper left {:.4}   upper right {:.4}", quadrant(0.0, 0.5), quadrant(1.0, 0.5));
    println!("  lower left {:.4}   lower right {:.4}", quadrant(0.0, 0.0), quadrant(1.0, 0.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
