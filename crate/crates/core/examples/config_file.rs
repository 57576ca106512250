//! Drives a run from the flat `key = value` format also accepted by the
//! `simulate --config` command line.

use viscodamage::config::SimConfig;

const SETTINGS: &str = "
# softer material, more diffusion, a coarse grid
experiment = 3
h = 1/8
k = 1/8
lame_mu = 2
kappa = 1.0
traction = -0.5, -1.5
zeta0 = 0.9
";

pub fn run(_args: &[String]) -> viscodamage::Result<()> {
    let mut config = SimConfig::default();
    config.apply_str(SETTINGS)?;
    let sim = config.simulation()?;
    let run = sim.run(config.initial_state(&sim)?, Default::default())?;
    for s in &run.history {
        println!(
            "n = {:>2}  t = {:.3}  zeta in [{:.5}, {:.5}]  |w|_V = {:.5}",
            s.step, s.time, s.min_zeta, s.max_zeta, s.norm_w_v
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
