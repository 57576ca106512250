//! Spatial refinement study on the unit-square benchmark with a fixed time
//! step, measured against a finer reference solution.
//!
//!     cargo run --release --example h_convergence -- [reference_m] [out_dir]
//!
//! sweeps `h = 1/2, 1/4, ...` up to `reference_m / 4` (default 16) with
//! `k = 1/reference_m`.

use std::path::Path;

use viscodamage::config::{Scenario, SimConfig};
use viscodamage::convergence::{ConvergenceStudy, Sweep};

pub fn run(args: &[String]) -> viscodamage::Result<()> {
    let m: usize = args.first().and_then(|a| a.parse().ok()).unwrap_or(16);
    let values: Vec<f64> = (1..).map(|i| 0.5f64.powi(i)).take_while(|&h| h * m as f64 >= 4.0 - 1e-9).collect();
    let study = ConvergenceStudy::new(SimConfig::scenario(Scenario::Square), Sweep::H, values, 1.0 / m as f64, 1.0 / m as f64);
    let report = study.run()?;
    print!("{}", report.to_table());
    if let Some(dir) = args.get(1) {
        std::fs::create_dir_all(dir)?;
        report.write_csv(&Path::new(dir).join("report.csv"))?;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
