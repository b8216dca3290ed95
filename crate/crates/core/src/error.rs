//! Error type shared by all ksl modules.

use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Domain violations (inadmissible parameters, infeasible normalization,
/// undersized grids) are kept distinct from numerical failures
/// (`SubdivisionLimit`) so callers can map them to exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The steepness parameter lies below the admissible minimum; the
    /// squared amplitude would be negative there.
    #[error("X = {x:.6} is below the admissible minimum X0 = {x_min:.6}")]
    BelowMinimumX { x: f64, x_min: f64 },

    /// Catch-all for precondition violations that carry no structure.
    #[error("{0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance.
    #[error("quadrature did not reach tolerance within {max_subdivisions} subdivisions (estimate {estimate:.6e}, error bound {error_bound:.3e})")]
    SubdivisionLimit {
        estimate: f64,
        error_bound: f64,
        max_subdivisions: u32,
    },

    /// Sampling grid cannot resolve the fastest oscillation present.
    #[error("grid spacing {spacing:.6e} exceeds the resolution limit {limit:.6e}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    /// Grid span does not cover the support required by the operation.
    #[error("grid [{lo:.4}, {hi:.4}] does not cover the required interval [{need_lo:.4}, {need_hi:.4}]")]
    GridTooSmall {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    /// No real normalization constant exists for the requested hbar.
    #[error("hbar = {hbar:.6e} is below the minimal feasible value {min_feasible:.6e} for this soliton shape")]
    Infeasible { hbar: f64, min_feasible: f64 },

    /// Density-estimate window is too narrow relative to the soliton size.
    #[error("interval length {len:.4e} must be at least {required:.4e} (10x the soliton size)")]
    IntervalTooNarrow { len: f64, required: f64 },

    /// Two-point tensor would blow past the configured memory cap.
    #[error("tensor would hold {entries} complex entries, over the configured cap of {cap}")]
    TensorTooLarge { entries: u64, cap: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
