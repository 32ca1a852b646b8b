//! Numerical laboratory for the stationary Gross–Pitaevskii equation with a
//! harmonic trap, `-Δu + |x|²u = ωu + |u|^{p-2}u` on radial functions.
//!
//! The [`numkernel`] and [`bubble`] modules are generic over the scalar
//! type; the solver modules run in `f64` through the aliases below.

pub mod asymptotics;
pub mod bubble;
pub mod error;
pub mod greenfn;
pub mod numkernel;
pub mod shooting;
pub mod spectral;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type RadialGrid = numkernel::RadialGrid<f64>;
pub type RadialProfile = numkernel::RadialProfile<f64>;
pub type TridiagonalOperator = numkernel::TridiagonalOperator<f64>;
