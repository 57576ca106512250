//! The plate rests on a rigid frictional foundation under the left half of
//! its bottom edge. The foundation corner at (1, 0) concentrates damage.
//!
//!     cargo run --release --example partial_foundation -- [m] [out_dir]

use std::path::Path;

use viscodamage::config::SimConfig;
use viscodamage::output::run_experiment;

pub fn run(args: &[String]) -> viscodamage::Result<()> {
    let m: f64 = args.first().and_then(|a| a.parse().ok()).unwrap_or(16.0);
    let config = SimConfig::experiment("2")?.with_resolution(1.0 / m, 1.0 / m);
    let sim = config.simulation()?;
    let run = match args.get(1) {
        Some(dir) => run_experiment(&config, Path::new(dir))?.run,
        None => sim.run(config.initial_state(&sim)?, Default::default())?,
    };
    let last = run.final_state();
    let zeta = &last.zeta.values;
    let worst = (0..zeta.len()).min_by(|&a, &b| zeta[a].total_cmp(&zeta[b])).unwrap();
    let p = sim.mesh().vertices()[worst];
    println!("h = k = 1/{m}");
    println!("smallest damage value {:.5} at ({:.3}, {:.3})", zeta[worst], p[0], p[1]);
    println!("distance to the foundation corner: {:.4}", (p[0] - 1.0).hypot(p[1]));

    // tangential velocity along the contact zone at the final time
    let nx = sim.mesh().nx();
    print!("bottom-edge slip velocity:");
    for i in (0..=nx / 2).step_by((nx / 8).max(1)) {
        print!(" {:+.2e}", last.w.values[i][0]);
    }
    println!();
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
