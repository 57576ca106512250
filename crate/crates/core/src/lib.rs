//! Finite element simulation of a viscoelastic body with damage in
//! quasistatic bilateral frictional contact, on rectangular domains meshed
//! with structured triangles.
//!
//! Velocity, displacement and damage are continuous piecewise linear;
//! stress is piecewise constant. Time is discretized by backward Euler with
//! the elastic and damage-source terms lagged one step.

pub mod assembly;
pub mod config;
pub mod convergence;
pub mod error;
pub mod friction;
pub mod material;
pub mod mesh;
pub mod output;
pub mod solvers;
pub mod spaces;
pub mod sparse;
pub mod tensor;
pub mod timestepper;

pub use error::{Error, Result};
