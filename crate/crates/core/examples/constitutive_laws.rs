//! Pointwise constitutive maps: viscosity, damaged elasticity, the damage
//! source, and the von Mises alternative to damaged elasticity.

use viscodamage::material::{
    apply_elasticity, apply_viscosity, damage_source, project_von_mises, ElasticityLaw, MaterialParams,
};
use viscodamage::tensor::SymTensor2;

pub fn run(_args: &[String]) -> viscodamage::Result<()> {
    let p = MaterialParams::default();
    let tau = SymTensor2 {
        xx: 0.1,
        yy: -0.05,
        xy: 0.02,
    };
    println!("strain            {tau:?}");
    println!("viscous stress    {:?}", apply_viscosity(tau, &p));
    for zeta in [1.0, 0.5, 0.0] {
        println!("elastic, zeta={zeta:.1} {:?}", apply_elasticity(tau, zeta, &p)?);
    }
    println!("\ndamage source phi(tau, zeta):");
    for zeta in [1.0, 0.6, 0.2, 0.1] {
        println!("  zeta = {zeta:.1}: {:+.5}", damage_source(tau, zeta, p.source_floor));
    }
    let big = 10.0 * tau;
    let projected = project_von_mises(big, 0.5, 1.0);
    println!("\nvon Mises projection of {big:?} with zeta = 0.5, yield stress 1:");
    println!("  {projected:?}, deviator norm {:.4}", projected.deviator().norm());
    let law = ElasticityLaw::VonMises {
        eta: 1.0,
        yield_sigma: 1.0,
    };
    println!("  resulting stress {:?}", law.stress(big, 0.5, &p)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> viscodamage::Result<()> {
    run(&std::env::args().skip(1).collect::<Vec<_>>())
}
