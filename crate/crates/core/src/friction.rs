//! Friction dissipation pseudopotential `j(ξ) = bound ‖ξ‖`, its Clarke
//! directional derivative, and the smoothing used by the velocity solver.

use crate::error::{Error, Result};

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionModel {
    pub bound: f64,
}

impl Default for FrictionModel {
    fn default() -> Self {
        FrictionModel { bound: 20.0 }
    }
}

impl FrictionModel {
    pub fn new(bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(Error::Config(format!("friction bound {bound} must be non-negative")));
        }
        Ok(FrictionModel { bound })
    }

    pub fn value(&self, xi: [f64; 2]) -> f64 {
        self.bound * norm(xi)
    }

    /// Clarke directional derivative `j⁰(ξ; η)`. The potential is convex, so
    /// this is the one-sided directional derivative.
    pub fn clarke_derivative(&self, xi: [f64; 2], eta: [f64; 2]) -> f64 {
        let n = norm(xi);
        if n == 0.0 {
            self.bound * norm(eta)
        } else {
            self.bound * dot(xi, eta) / n
        }
    }

    /// Smoothed potential `bound (sqrt(‖ξ‖² + ρ²) - ρ)` and its gradient.
    pub fn regularized(&self, xi: [f64; 2], rho: f64) -> (f64, [f64; 2]) {
        let s = (dot(xi, xi) + rho * rho).sqrt();
        let value = self.bound * (s - rho);
        (value, [self.bound * xi[0] / s, self.bound * xi[1] / s])
    }

    /// Smoothed potential along a fixed unit direction: value, first and
    /// second derivative with respect to the scalar coordinate `t`.
    pub fn regularized_scalar(&self, t: f64, rho: f64) -> (f64, f64, f64) {
        let s = (t * t + rho * rho).sqrt();
        (
            self.bound * (s - rho),
            self.bound * t / s,
            self.bound * rho * rho / (s * s * s),
        )
    }
}
