//! The friction potential `j(ξ) = 20 ‖ξ‖`, its directional derivative at the
//! kink, and the smoothed version used inside the velocity solver.

use viscodamage::friction::FrictionModel;

pub fn run(_args: &[String]) -> viscodamage::Result<()> {
    let j = FrictionModel::default();
    let xi = [3.0, 4.0];
    println!("j({xi:?}) = {}", j.value(xi));
    println!("j0(0; {xi:?}) = {}  (the kink costs the full bound)", j.clarke_derivative([0.0, 0.0], xi));
    println!("j0({xi:?}; {xi:?}) = {}", j.clarke_derivative(xi, xi));
    println!("j0({xi:?}; (4, -3)) = {}", j.clarke_derivative(xi, [4.0, -3.0]));
    println!("\nsmoothing gap j - j_rho along xi = (t, 0):");
    println!("{:>8} {:>12} {:>12} {:>12}", "t", "rho=1e-1", "rho=1e-3", "rho=1e-8");
    for t in [0.0, 1e-4, 1e-2, 1.0] {
        let gaps: Vec<String> = [1e-1, 1e-3, 1e-8]
            .iter()
            .map(|&rho| format!("{:12.3e}", j.value([t, 0.0]) - j.regularized([t, 0.0], rho).0))
            .collect();
        println!("{t:>8} {}", gaps.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
