//! Numerical primitives shared by every solver: grids, special functions,
//! quadrature, tridiagonal algebra and an adaptive ODE stepper.
//!
//! Everything here is generic over [`Real`](crate::scalar::Real).

pub mod fit;
pub mod grid;
pub mod kummer;
pub mod ode;
pub mod quad;
pub mod special;
pub mod tridiag;

pub use fit::fit_line;
pub use grid::{RadialGrid, RadialProfile};
pub use kummer::{eval_polynomial, kummer_m, kummer_polynomial, KummerValue};
pub use ode::{Dopri5, Leg};
pub use quad::{derivatives5, fornberg_weights, quad_radial, quad_radial_simpson, radial_integral_from_origin, simpson, trapezoid};
pub use special::{beta, log_gamma, power_integral, sphere_measure};
pub use tridiag::{solve_general_tridiagonal, solve_tridiagonal, EigCount, TridiagonalOperator};
