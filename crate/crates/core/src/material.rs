//! Constitutive operators: Kelvin–Voigt viscosity, damage-weakened
//! elasticity, the mechanical damage source, and a von Mises variant of the
//! elastic law.

use crate::error::{Error, Result};
use crate::tensor::SymTensor2;

/// Material data of the viscoelastic body with damage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    /// Shear viscosity; the viscosity operator is `2 visc_shear τ + visc_bulk tr(τ) I`.
    pub visc_shear: f64,
    pub visc_bulk: f64,
    pub lame_mu: f64,
    pub lame_lambda: f64,
    /// Microcrack diffusion coefficient.
    pub kappa: f64,
    /// Yield limit of the undamaged material (von Mises law only).
    pub yield_sigma: Option<f64>,
    /// Below this damage value the recovery term of the source is frozen.
    pub source_floor: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            visc_shear: 2.0,
            visc_bulk: 2.0,
            lame_mu: 4.0,
            lame_lambda: 4.0,
            kappa: 0.5,
            yield_sigma: None,
            source_floor: 0.2,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("visc_shear", self.visc_shear),
            ("visc_bulk", self.visc_bulk),
            ("lame_mu", self.lame_mu),
            ("lame_lambda", self.lame_lambda),
            ("kappa", self.kappa),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if let Some(s) = self.yield_sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("yield_sigma = {s} must be positive")));
            }
        }
        if !(self.source_floor > 0.0 && self.source_floor <= 1.0) {
            return Err(Error::Config(format!(
                "source_floor = {} must lie in (0, 1]",
                self.source_floor
            )));
        }
        Ok(())
    }

    /// Strong monotonicity constant of the viscosity operator.
    pub fn viscosity_monotonicity(&self) -> f64 {
        2.0 * self.visc_shear
    }
}

/// `A(τ) = 2 visc_shear τ + visc_bulk tr(τ) I`.
pub fn apply_viscosity(tau: SymTensor2, params: &MaterialParams) -> SymTensor2 {
    2.0 * params.visc_shear * tau + (params.visc_bulk * tau.trace()) * SymTensor2::IDENTITY
}

/// Accepts damage values within 1e-12 of `[0, 1]` and clamps them.
pub fn checked_damage(zeta: f64) -> Result<f64> {
    const TOL: f64 = 1e-12;
    if !(-TOL..=1.0 + TOL).contains(&zeta) {
        return Err(Error::DamageOutOfRange(zeta));
    }
    Ok(zeta.clamp(0.0, 1.0))
}

/// `B(τ, ζ) = ζ (2 μ τ + λ tr(τ) I)`.
pub fn apply_elasticity(tau: SymTensor2, zeta: f64, params: &MaterialParams) -> Result<SymTensor2> {
    let zeta = checked_damage(zeta)?;
    Ok(zeta * (2.0 * params.lame_mu * tau + (params.lame_lambda * tau.trace()) * SymTensor2::IDENTITY))
}

/// Mechanical source of damage,
/// `2 (1 - ζ)/ζ - 20 ‖τ‖²` for `ζ ≥ floor`, with the recovery term frozen at
/// its value at `floor` below it (8 for the default floor 0.2).
pub fn damage_source(tau: SymTensor2, zeta: f64, floor: f64) -> f64 {
    let z = zeta.max(floor);
    2.0 * (1.0 - z) / z - 20.0 * tau.norm_squared()
}

/// Projection onto the von Mises set `{τ : ‖τ^D‖ ≤ ζ σ_Y}`.
pub fn project_von_mises(tau: SymTensor2, zeta: f64, yield_sigma: f64) -> SymTensor2 {
    let dev = tau.deviator();
    let radius = zeta * yield_sigma;
    let norm = dev.norm();
    if norm <= radius {
        return tau;
    }
    let spherical = (0.5 * tau.trace()) * SymTensor2::IDENTITY;
    spherical + (radius / norm) * dev
}

/// The elastic part of the constitutive law.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ElasticityLaw {
    /// Damage-weakened linear isotropic elasticity.
    #[default]
    Damaged,
    /// `η (τ - P_{K(ζ)} τ)` with the von Mises set `K(ζ)`.
    VonMises { eta: f64, yield_sigma: f64 },
}

impl ElasticityLaw {
    pub fn stress(&self, eps: SymTensor2, zeta: f64, params: &MaterialParams) -> Result<SymTensor2> {
        match *self {
            ElasticityLaw::Damaged => apply_elasticity(eps, zeta, params),
            ElasticityLaw::VonMises { eta, yield_sigma } => {
                let zeta = checked_damage(zeta)?;
                Ok(eta * (eps - project_von_mises(eps, zeta, yield_sigma)))
            }
        }
    }
}
