//! ksl-core: a numerical laboratory for 1D envelope solitons in a Kerr
//! dielectric.
//!
//! The crate covers the full pipeline from the algebraic parameter system
//! of a single soliton to entangled two-soliton states:
//!
//! - [`numerics`]: adaptive quadrature, finite differences, splittable
//!   deterministic randomness.
//! - [`dispersion`]: the closed-form solution of the soliton's parameter
//!   algebra and its residual verification.
//! - [`fields`]: analytic electric/magnetic fields and vector potential
//!   for both circular polarizations, plus the nonlinear wave-equation
//!   residual of the ansatz.
//! - [`observables`]: energy, spin and momentum by quadrature against
//!   their closed forms.
//! - [`quantization`]: the complex field map, its normalization, and
//!   stochastic N-trial wave functions with density and operator means.
//! - [`entanglement`]: two-soliton singlet tensors and their ensembles.
//!
//! All computations are pure functions of their inputs (seeds included),
//! and parallel execution never changes results.

pub mod dispersion;
pub mod entanglement;
pub mod error;
pub mod fields;
pub mod grid;
pub mod numerics;
pub mod observables;
pub mod quantization;
pub mod report;
pub mod vec3;

pub use dispersion::{
    solve_params, x_min, z_of_x, Medium, Polarization, ScanRow, ScanSummary, SolitonParams,
};
pub use error::{Error, Result};
pub use grid::Grid;
pub use numerics::{Interval, QuadratureSpec, RandomStream};
