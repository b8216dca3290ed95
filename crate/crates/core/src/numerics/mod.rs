//! Shared numerical kernels: adaptive quadrature, finite differences,
//! and deterministic splittable randomness.
//!
//! Everything here is a pure function of its arguments and safe to call
//! from any number of workers concurrently.

pub mod diff;
pub mod quad;
pub mod rng;

pub use diff::{derivative, grid_derivative, DiffOrder};
pub use quad::{integrate, Interval, QuadratureSpec};
pub use rng::RandomStream;

/// Hyperbolic secant; returns 0 cleanly once `cosh` overflows.
#[inline]
pub fn sech(u: f64) -> f64 {
    1.0 / u.cosh()
}
