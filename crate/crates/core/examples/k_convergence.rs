//! Temporal refinement study on the unit-square benchmark with a fixed mesh,
//! with errors taken at the final time and also as the largest error over
//! the time nodes shared with the reference.
//!
//!     cargo run --release --example k_convergence -- [reference_n]

use viscodamage::config::{Scenario, SimConfig};
use viscodamage::convergence::{ConvergenceStudy, ErrorTime, Sweep};

pub fn run(args: &[String]) -> viscodamage::Result<()> {
    let n: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(16);
    let values: Vec<f64> = (1..).map(|i| 0.5f64.powi(i)).take_while(|&k| k * n as f64 >= 4.0 - 1e-9).collect();
    let mut study =
        ConvergenceStudy::new(SimConfig::scenario(Scenario::Square), Sweep::K, values, 1.0 / n as f64, 1.0 / n as f64);
    let reference = study.compute_reference()?;
    print!("{}", study.run_against(&reference)?.to_table());

    study.error_time = ErrorTime::MaxOverCommonNodes;
    let reference = study.compute_reference()?;
    println!("\nlargest error over shared time nodes:");
    print!("{}", study.run_against(&reference)?.to_table());
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
