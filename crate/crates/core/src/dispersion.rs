//! Algebraic parameter system of the envelope soliton.
//!
//! A soliton in the Kerr medium is fixed by three coupled algebraic
//! relations between its amplitude, velocity, envelope decay rate,
//! carrier wavenumber and frequency. With the dimensionless steepness
//! `X = k^2 / (eps0 w^2)` as the independent parameter the system has the
//! closed-form solution
//!
//! ```text
//! Z        = 3X - 1 + sqrt(18 X^2 + 14 X)          (Z = 3 eps1 A^2 / eps0)
//! eps0 V^2 = (X + 1) / (X + (1 + Z)^2)
//! k0^2     = eps0 w^2 (1 + Z)^2 (X + 1) / (X + (1 + Z)^2)
//! ```
//!
//! admissible for `X >= X0 = (-10 + sqrt(109)) / 9`, the root of
//! `9 X^2 + 20 X - 1 = 0` where the amplitude vanishes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Kerr dielectric constants plus the simulation value of hbar.
///
/// The permittivity law is `eps(E) = eps0 + eps1 |E|^2`; the vacuum speed
/// of light is unity throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    /// Linear permittivity, dimensionless, > 0.
    pub eps0: f64,
    /// Kerr coefficient, field^-2 units, > 0.
    pub eps1: f64,
    /// Planck constant in simulation units, > 0.
    pub hbar: f64,
}

impl Medium {
    pub fn new(eps0: f64, eps1: f64, hbar: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps1 > 0.0 && hbar > 0.0) {
            return Err(Error::Domain(format!(
                "medium constants must be positive (eps0 = {eps0}, eps1 = {eps1}, hbar = {hbar})"
            )));
        }
        Ok(Self { eps0, eps1, hbar })
    }

    /// Reference medium `eps0 = eps1 = hbar = 1` used for calibration.
    pub fn reference() -> Self {
        Self {
            eps0: 1.0,
            eps1: 1.0,
            hbar: 1.0,
        }
    }

    /// Field-dependent permittivity `eps0 + eps1 |E|^2`.
    #[inline]
    pub fn permittivity(&self, e_squared: f64) -> f64 {
        self.eps0 + self.eps1 * e_squared
    }
}

/// Sense of circular polarization of the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Right,
    Left,
}

impl Polarization {
    pub fn mirrored(self) -> Self {
        match self {
            Polarization::Right => Polarization::Left,
            Polarization::Left => Polarization::Right,
        }
    }

    /// +1 for right, -1 for left; the sign the spin closed form carries.
    pub fn spin_sign(self) -> f64 {
        match self {
            Polarization::Right => 1.0,
            Polarization::Left => -1.0,
        }
    }
}

/// Complete parameter set of one envelope soliton.
///
/// All fields are consistent by construction when produced by
/// [`solve_params`]; [`residuals_789`] quantifies how well any given set
/// satisfies the three defining relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    /// Medium the soliton lives in.
    pub medium: Medium,
    /// Steepness parameter `k^2 / (eps0 omega^2)`, >= [`x_min`].
    pub x: f64,
    /// Nonlinearity strength `Z = 3 eps1 A^2 / eps0`, >= 0.
    pub nonlinearity: f64,
    /// Envelope amplitude `A`, field units, >= 0.
    pub amplitude: f64,
    /// Envelope group velocity `V` in (0, 1].
    pub velocity: f64,
    /// Envelope decay rate `k`, inverse length.
    pub envelope_k: f64,
    /// Carrier wavenumber `k0`, inverse length.
    pub carrier_k: f64,
    /// Carrier frequency `omega`, inverse time.
    pub omega: f64,
    /// Small expansion parameter `lambda = k V / omega`.
    pub lambda: f64,
    /// Handedness of the carrier.
    pub polarization: Polarization,
    /// Envelope peak position at t = 0 (translation freedom).
    pub center: f64,
    /// Additive carrier phase (gauge freedom).
    pub phase: f64,
}

impl SolitonParams {
    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Proper envelope size `1/k`.
    pub fn soliton_size(&self) -> f64 {
        1.0 / self.envelope_k
    }

    /// True when the envelope assumption `k0 >> k` is getting thin;
    /// callers may warn but should not fail.
    pub fn envelope_condition_strained(&self) -> bool {
        self.envelope_k / self.carrier_k > 0.5
    }
}

/// Lower admissible bound `X0 = (-10 + sqrt(109)) / 9` of the steepness
/// parameter; below it the squared amplitude would be negative.
pub fn x_min() -> f64 {
    (-10.0 + 109.0_f64.sqrt()) / 9.0
}

/// Nonlinearity strength `Z(X) = 3X - 1 + sqrt(18 X^2 + 14 X)`.
///
/// Clamps the rounding fuzz at the `Z = 0` boundary so the returned value
/// is never negative for admissible input.
pub fn z_of_x(x: f64) -> Result<f64> {
    let x0 = x_min();
    if !(x >= x0) {
        return Err(Error::BelowMinimumX { x, x_min: x0 });
    }
    let z = 3.0 * x - 1.0 + (18.0 * x * x + 14.0 * x).sqrt();
    Ok(z.max(0.0))
}

/// Solve the full parameter set from the steepness `x` and carrier
/// frequency `omega`, right polarization, centered at the origin.
pub fn solve_params(medium: &Medium, x: f64, omega: f64) -> Result<SolitonParams> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    let z = z_of_x(x)?;
    let one_z = 1.0 + z;
    let denom = x + one_z * one_z;
    let eps0_v2 = (x + 1.0) / denom;

    let envelope_k = omega * (medium.eps0 * x).sqrt();
    let amplitude = (z * medium.eps0 / (3.0 * medium.eps1)).sqrt();
    let velocity = (eps0_v2 / medium.eps0).sqrt();
    let carrier_k = omega * medium.eps0.sqrt() * one_z * eps0_v2.sqrt();
    let lambda = envelope_k * velocity / omega;

    Ok(SolitonParams {
        medium: *medium,
        x,
        nonlinearity: z,
        amplitude,
        velocity,
        envelope_k,
        carrier_k,
        omega,
        lambda,
        polarization: Polarization::Right,
        center: 0.0,
        phase: 0.0,
    })
}

/// Relative residuals of the three defining algebraic relations:
///
/// ```text
/// (1) eps0 (w^2 - k^2 V^2)        = k0^2 - k^2
/// (2) eps1 A^2 (9 k^2 V^2 - w^2)  = 2 k^2 (eps0 V^2 - 1)
/// (3) k0                          = w V (eps0 + 3 eps1 A^2)
/// ```
///
/// Each is normalized by `max(|lhs|, |rhs|, eps_machine)`, which keeps the
/// amplitude-zero boundary (both sides of (2) vanish) at residual 0.
pub fn residuals_789(medium: &Medium, p: &SolitonParams) -> [f64; 3] {
    let w2 = p.omega * p.omega;
    let k2 = p.envelope_k * p.envelope_k;
    let k02 = p.carrier_k * p.carrier_k;
    let v2 = p.velocity * p.velocity;
    let a2 = p.amplitude * p.amplitude;

    let pairs = [
        (medium.eps0 * (w2 - k2 * v2), k02 - k2),
        (
            medium.eps1 * a2 * (9.0 * k2 * v2 - w2),
            2.0 * k2 * (medium.eps0 * v2 - 1.0),
        ),
        (
            p.carrier_k,
            p.omega * p.velocity * (medium.eps0 + 3.0 * medium.eps1 * a2),
        ),
    ];
    pairs.map(|(lhs, rhs)| {
        let scale = lhs.abs().max(rhs.abs()).max(f64::EPSILON);
        (lhs - rhs).abs() / scale
    })
}

/// One row of the parameter-range scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub x: f64,
    pub z: f64,
    pub lambda2: f64,
    pub k2_over_k02: f64,
    pub eps0_v2: f64,
}

/// Empirical extrema of the scanned dimensionless ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub x_min: f64,
    pub lambda2_min: f64,
    pub lambda2_max: f64,
    pub k2_over_k02_min: f64,
    pub k2_over_k02_max: f64,
}

/// Tabulate `(X, Z, lambda^2, k^2/k0^2, eps0 V^2)` over a grid of
/// steepness values. Rows come back in input order; evaluation is
/// data-parallel.
pub fn scan_ranges(medium: &Medium, x_grid: &[f64]) -> Result<Vec<ScanRow>> {
    use rayon::prelude::*;
    x_grid
        .par_iter()
        .map(|&x| {
            let p = solve_params(medium, x, 1.0)?;
            Ok(ScanRow {
                x,
                z: p.nonlinearity,
                lambda2: p.lambda * p.lambda,
                k2_over_k02: (p.envelope_k * p.envelope_k) / (p.carrier_k * p.carrier_k),
                eps0_v2: medium.eps0 * p.velocity * p.velocity,
            })
        })
        .collect()
}

/// Min/max of the scan's dimensionless ratios, for comparison against the
/// claimed analytic ranges.
pub fn summarize_scan(rows: &[ScanRow]) -> Option<ScanSummary> {
    if rows.is_empty() {
        return None;
    }
    let fold = |pick: fn(&ScanRow) -> f64, min: bool| {
        rows.iter()
            .map(pick)
            .fold(if min { f64::INFINITY } else { f64::NEG_INFINITY }, |a, b| {
                if min {
                    a.min(b)
                } else {
                    a.max(b)
                }
            })
    };
    Some(ScanSummary {
        x_min: x_min(),
        lambda2_min: fold(|r| r.lambda2, true),
        lambda2_max: fold(|r| r.lambda2, false),
        k2_over_k02_min: fold(|r| r.k2_over_k02, true),
        k2_over_k02_max: fold(|r| r.k2_over_k02, false),
    })
}

/// Log-spaced grid of `n` steepness values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::Domain(format!(
            "log grid needs 0 < lo < hi and n >= 2, got lo = {lo}, hi = {hi}, n = {n}"
        )));
    }
    let ratio = hi / lo;
    Ok((0..n)
        .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect())
}

/// Linear grid of `n` steepness values on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(hi > lo && n >= 2) {
        return Err(Error::Domain(format!(
            "linear grid needs lo < hi and n >= 2, got lo = {lo}, hi = {hi}, n = {n}"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}
