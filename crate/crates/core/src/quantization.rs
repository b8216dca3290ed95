//! Stochastic one-particle layer.
//!
//! The complex map `phi = (nu A_pot + i pi / nu) / sqrt(2)` with conjugate
//! momentum `pi = -eps(E) E` turns each classical soliton into a vector in
//! a function space; `nu` is fixed by demanding `int |phi|^2 dz = hbar`.
//! A wave function is then realized as the normalized sum of `N`
//! independently translated and phase-shifted copies,
//! `Psi_N = (hbar N)^(-1/2) sum_j phi_j`. Densities and operator means
//! on `Psi_N` reproduce classical per-trial observables up to terms of
//! order (soliton size / observation window) plus Monte Carlo noise.
//!
//! Everything is a pure function of (seed, configuration): trial `j`
//! draws its randomness from `RandomStream::new(seed, j)` and summation
//! happens in trial order at every grid point, so results are identical
//! for any worker count.

use crate::dispersion::{Polarization, SolitonParams};
use crate::error::{Error, Result};
use crate::fields::{electric_field, vector_potential, PotentialOrder, SpacetimePoint};
use crate::grid::Grid;
use crate::numerics::{Interval, QuadratureSpec, RandomStream};
use crate::observables;
use crate::vec3::dot;
use num_complex::Complex64;
use serde::Serialize;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Half-width (in envelope widths) a grid must cover around a soliton for
/// its fields to be numerically complete; sech(40) ~ 8.5e-18.
pub const SUPPORT_HALF_WIDTHS: f64 = 40.0;

/// Complex field sample of phi at one point, all three components.
pub(crate) fn phi_at(p: &SolitonParams, nu: f64, z: f64) -> [Complex64; 3] {
    let pt = SpacetimePoint::new(0.0, z);
    let a = vector_potential(p, &pt, PotentialOrder::FirstOrderLambda);
    let e = electric_field(p, &pt);
    let eps = p.medium.permittivity(dot(e, e));
    let inv_nu = 1.0 / nu;
    [0, 1, 2].map(|c| {
        // pi = -eps E
        Complex64::new(nu * a[c] * FRAC_1_SQRT_2, -eps * e[c] * inv_nu * FRAC_1_SQRT_2)
    })
}

/// The complex vector field of one soliton sampled on a grid at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiField {
    pub grid: Grid,
    /// Three interleaved complex components per node: `values[3 i + c]`.
    pub values: Vec<Complex64>,
    pub nu: f64,
    pub hbar: f64,
}

/// Sample `phi` on `grid`. The grid must cover at least 40 envelope
/// widths either side of the soliton center so the edge values are
/// negligible against the peak.
pub fn phi_from_fields(p: &SolitonParams, grid: &Grid, nu: f64) -> Result<PhiField> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("nu must be positive, got {nu}")));
    }
    let half = SUPPORT_HALF_WIDTHS / p.envelope_k;
    if !grid.covers(p.center - half, p.center + half) {
        return Err(Error::GridTooSmall {
            lo: grid.lo,
            hi: grid.hi(),
            need_lo: p.center - half,
            need_hi: p.center + half,
        });
    }
    let mut values = Vec::with_capacity(3 * grid.n);
    for z in grid.points() {
        values.extend_from_slice(&phi_at(p, nu, z));
    }
    Ok(PhiField {
        grid: *grid,
        values,
        nu,
        hbar: p.medium.hbar,
    })
}

/// Trapezoidal `int |v|^2 dz` of an interleaved complex 3-vector field.
pub(crate) fn trapz_norm_sq(grid: &Grid, values: &[Complex64]) -> f64 {
    (0..grid.n)
        .map(|i| {
            let base = 3 * i;
            let s: f64 = (0..3).map(|c| values[base + c].norm_sqr()).sum();
            grid.weight(i) * s
        })
        .sum()
}

/// Trapezoidal `-i int (v* x v)_z dz = 2 int Im(vx* vy) dz`.
pub(crate) fn trapz_spin_z(grid: &Grid, values: &[Complex64]) -> f64 {
    (0..grid.n)
        .map(|i| {
            let base = 3 * i;
            grid.weight(i) * 2.0 * (values[base].conj() * values[base + 1]).im
        })
        .sum()
}

/// Trapezoidal `Re int v* (-i d/dz) v dz` with a five-point interior
/// stencil for the derivative (edges excluded; fields vanish there).
pub(crate) fn trapz_momentum_z(grid: &Grid, values: &[Complex64]) -> f64 {
    let n = grid.n;
    if n < 5 {
        return 0.0;
    }
    let c = 1.0 / (12.0 * grid.step);
    let mut total = 0.0;
    for i in 2..n - 2 {
        let w = grid.weight(i);
        for comp in 0..3 {
            let idx = |j: usize| values[3 * j + comp];
            let d = (-idx(i + 2) + idx(i + 1) * 8.0 - idx(i - 1) * 8.0 + idx(i - 2)) * c;
            // Re[conj(v) (-i) d] = Im[conj(v) d]
            total += w * (idx(i).conj() * d).im;
        }
    }
    total
}

impl PhiField {
    /// `int |phi|^2 dz` on the stored grid.
    pub fn norm_squared(&self) -> f64 {
        trapz_norm_sq(&self.grid, &self.values)
    }

    /// `-i int (phi* x phi)_z dz`; equals the classical spin integral
    /// exactly, independent of `nu`.
    pub fn spin_integral(&self) -> f64 {
        trapz_spin_z(&self.grid, &self.values)
    }

    /// `Re int phi* (-i d/dz) phi dz`; equals the classical momentum
    /// integral after integration by parts, independent of `nu`.
    pub fn momentum_integral(&self) -> f64 {
        trapz_momentum_z(&self.grid, &self.values)
    }
}

/// Shape integrals entering the normalization condition:
/// `I_A = int |A_pot|^2 dz`, `I_pi = int |pi|^2 dz` (trapezoid on `grid`).
pub fn shape_integrals(p: &SolitonParams, grid: &Grid) -> (f64, f64) {
    let mut i_a = 0.0;
    let mut i_pi = 0.0;
    for (i, z) in grid.points().enumerate() {
        let pt = SpacetimePoint::new(0.0, z);
        let a = vector_potential(p, &pt, PotentialOrder::FirstOrderLambda);
        let e = electric_field(p, &pt);
        let eps = p.medium.permittivity(dot(e, e));
        let w = grid.weight(i);
        i_a += w * dot(a, a);
        i_pi += w * eps * eps * dot(e, e);
    }
    (i_a, i_pi)
}

/// Smallest hbar for which the normalization condition has a real
/// solution: `sqrt(I_A I_pi)`.
pub fn min_feasible_hbar(p: &SolitonParams, grid: &Grid) -> f64 {
    let (i_a, i_pi) = shape_integrals(p, grid);
    (i_a * i_pi).sqrt()
}

/// Solve `(nu^2 I_A + I_pi / nu^2) / 2 = hbar` for the normalization
/// constant, returning the smaller positive root
/// `nu^2 = (hbar - sqrt(hbar^2 - I_A I_pi)) / I_A`.
///
/// The root choice is a convention (either root normalizes); it is
/// recorded in serialized output as `nu_root = "smaller"`.
pub fn solve_nu(p: &SolitonParams, grid: &Grid) -> Result<f64> {
    if p.amplitude <= 0.0 {
        return Err(Error::Domain(
            "cannot normalize a zero-amplitude soliton".into(),
        ));
    }
    let (i_a, i_pi) = shape_integrals(p, grid);
    let hbar = p.medium.hbar;
    let disc = hbar * hbar - i_a * i_pi;
    if disc < 0.0 {
        return Err(Error::Infeasible {
            hbar,
            min_feasible: (i_a * i_pi).sqrt(),
        });
    }
    Ok(((hbar - disc.sqrt()) / i_a).sqrt())
}

/// How trial polarizations are assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationPolicy {
    /// Every trial carries the same polarization.
    Fixed(Polarization),
    /// Trials alternate right/left by index (even -> right).
    Alternating,
}

impl PolarizationPolicy {
    fn assign(&self, index: u64) -> Polarization {
        match self {
            PolarizationPolicy::Fixed(p) => *p,
            PolarizationPolicy::Alternating => {
                if index % 2 == 0 {
                    Polarization::Right
                } else {
                    Polarization::Left
                }
            }
        }
    }
}

/// Configuration of a stochastic ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSpec {
    /// Number of independent trials, >= 1.
    pub trials: u64,
    /// Master seed; trial `j` uses stream index `j`.
    pub seed: u64,
    /// Centers are drawn uniformly from this interval. Must be at least
    /// ten soliton sizes long.
    pub centers: Interval,
    pub polarization: PolarizationPolicy,
    /// Grid padding beyond the center interval, in envelope widths.
    pub pad_over_k: f64,
    /// Grid step as a fraction of `min(1/k, 1/k0)`.
    pub step_fraction: f64,
}

impl EnsembleSpec {
    pub fn new(trials: u64, seed: u64, centers: Interval) -> Self {
        Self {
            trials,
            seed,
            centers,
            polarization: PolarizationPolicy::Fixed(Polarization::Right),
            pad_over_k: SUPPORT_HALF_WIDTHS,
            step_fraction: 1.0 / 20.0,
        }
    }
}

/// One randomized trial of the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trial {
    pub index: u64,
    pub center: f64,
    pub phase: f64,
    pub polarization: Polarization,
}

/// The assembled stochastic wave function.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleWaveFunction {
    /// Base soliton every trial is a translated/phase-shifted copy of.
    pub params: SolitonParams,
    pub trials: Vec<Trial>,
    pub grid: Grid,
    /// Interleaved complex components, `psi[3 i + c]`.
    pub psi: Vec<Complex64>,
    pub hbar: f64,
    pub nu: f64,
    pub seed: u64,
}

fn draw_trial(seed: u64, index: u64, centers: Interval, policy: PolarizationPolicy) -> Trial {
    let stream = RandomStream::new(seed, index);
    let (center, stream) = stream.uniform(centers.lo, centers.hi);
    let (phase, _) = stream.uniform(0.0, std::f64::consts::TAU);
    Trial {
        index,
        center,
        phase,
        polarization: policy.assign(index),
    }
}

/// Build `Psi_N` for `spec.trials` independent trials of the base soliton.
///
/// Deterministic for fixed (seed, spec) under any thread count: the value
/// at each grid point is accumulated over trials in index order, and
/// parallelism only splits the grid.
pub fn build_ensemble(p: &SolitonParams, spec: &EnsembleSpec) -> Result<EnsembleWaveFunction> {
    use rayon::prelude::*;

    if spec.trials == 0 {
        return Err(Error::Domain("ensemble needs at least one trial".into()));
    }
    let size = p.soliton_size();
    if spec.centers.length() < 10.0 * size {
        return Err(Error::IntervalTooNarrow {
            len: spec.centers.length(),
            required: 10.0 * size,
        });
    }

    let step = spec.step_fraction * (1.0 / p.envelope_k).min(1.0 / p.carrier_k);
    let pad = spec.pad_over_k / p.envelope_k;
    let grid = Grid::from_span(spec.centers.lo - pad, spec.centers.hi + pad, step)?;

    // nu depends only on the soliton shape; solve once on a matching grid
    let half = SUPPORT_HALF_WIDTHS / p.envelope_k;
    let norm_grid = Grid::from_span(p.center - half, p.center + half, step)?;
    let nu = solve_nu(p, &norm_grid)?;

    let trials: Vec<Trial> = (0..spec.trials)
        .map(|j| draw_trial(spec.seed, j, spec.centers, spec.polarization))
        .collect();

    let prefactor = 1.0 / (p.medium.hbar * spec.trials as f64).sqrt();
    let support = SUPPORT_HALF_WIDTHS / p.envelope_k;

    // per-trial parameter copies, once
    let trial_params: Vec<SolitonParams> = trials
        .iter()
        .map(|t| {
            p.with_center(t.center)
                .with_phase(t.phase)
                .with_polarization(t.polarization)
        })
        .collect();

    let mut psi = vec![Complex64::new(0.0, 0.0); 3 * grid.n];
    let chunk = 1024usize;
    psi.par_chunks_mut(3 * chunk)
        .enumerate()
        .for_each(|(ci, out)| {
            let i0 = ci * chunk;
            let npts = out.len() / 3;
            let z0 = grid.point(i0);
            let z1 = grid.point(i0 + npts - 1);
            for (t, tp) in trials.iter().zip(&trial_params) {
                // skip trials whose support misses this chunk entirely
                if t.center + support < z0 || t.center - support > z1 {
                    continue;
                }
                let lo = grid.index_at_or_after(t.center - support).max(i0);
                let hi = grid.index_at_or_before(t.center + support).min(i0 + npts - 1);
                for i in lo..=hi {
                    let phi = phi_at(tp, nu, grid.point(i));
                    let base = 3 * (i - i0);
                    for c in 0..3 {
                        out[base + c] += phi[c] * prefactor;
                    }
                }
            }
        });

    Ok(EnsembleWaveFunction {
        params: *p,
        trials,
        grid,
        psi,
        hbar: p.medium.hbar,
        nu,
        seed: spec.seed,
    })
}

impl EnsembleWaveFunction {
    /// `int |Psi_N|^2 dz`; close to 1 once cross terms average out.
    pub fn norm_squared(&self) -> f64 {
        trapz_norm_sq(&self.grid, &self.psi)
    }
}

/// Local density estimate over a window, together with the trial-count
/// frequency it should reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    /// Window snapped to grid nodes.
    pub interval: Interval,
    /// `(1/|window|) int_window |Psi_N|^2 dz`.
    pub rho: f64,
    /// `count(centers in window) / (N |window|)`.
    pub count_fraction: f64,
    /// Proper soliton size `1/k`.
    pub soliton_size: f64,
}

/// Compare the quadratic density of `Psi_N` over a window against the
/// frequency of trial centers falling inside it. The window must be at
/// least ten soliton sizes wide and lie inside the grid.
pub fn density_estimate(
    ens: &EnsembleWaveFunction,
    interval: Interval,
) -> Result<DensityEstimate> {
    let size = ens.params.soliton_size();
    if interval.length() < 10.0 * size {
        return Err(Error::IntervalTooNarrow {
            len: interval.length(),
            required: 10.0 * size,
        });
    }
    if !ens.grid.covers(interval.lo, interval.hi) {
        return Err(Error::GridTooSmall {
            lo: ens.grid.lo,
            hi: ens.grid.hi(),
            need_lo: interval.lo,
            need_hi: interval.hi,
        });
    }
    let i_lo = ens.grid.index_at_or_after(interval.lo);
    let i_hi = ens.grid.index_at_or_before(interval.hi);
    if i_hi <= i_lo + 1 {
        return Err(Error::IntervalTooNarrow {
            len: interval.length(),
            required: 10.0 * size,
        });
    }
    let snapped = Interval::new(ens.grid.point(i_lo), ens.grid.point(i_hi))?;
    let len = snapped.length();

    let mut mass = 0.0;
    for i in i_lo..=i_hi {
        let w = if i == i_lo || i == i_hi {
            0.5 * ens.grid.step
        } else {
            ens.grid.step
        };
        let base = 3 * i;
        let s: f64 = (0..3).map(|c| ens.psi[base + c].norm_sqr()).sum();
        mass += w * s;
    }

    let inside = ens
        .trials
        .iter()
        .filter(|t| snapped.contains(t.center))
        .count();

    Ok(DensityEstimate {
        interval: snapped,
        rho: mass / len,
        count_fraction: inside as f64 / (ens.trials.len() as f64 * len),
        soliton_size: size,
    })
}

/// Observable whose ensemble and operator means are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    MomentumZ,
    SpinZ,
}

/// The two sides of the mean-value rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanValue {
    pub observable: ObservableKind,
    /// `(1/N) sum_j A_j` with `A_j` the classical per-trial observable.
    pub ensemble_avg: f64,
    /// `int Psi* (hbar M) Psi dz` with the operator of the observable.
    pub operator_avg: f64,
}

/// Evaluate both sides of the mean-value rule on an ensemble.
///
/// Classical per-trial values follow from the translation and phase
/// invariance of the quadratures: every right-polarized trial carries the
/// same spin/momentum as the base soliton, left-polarized trials flip the
/// spin sign.
pub fn mean_value(
    ens: &EnsembleWaveFunction,
    observable: ObservableKind,
    quad: &QuadratureSpec,
) -> Result<MeanValue> {
    let base_right = ens.params.with_polarization(Polarization::Right);
    let n = ens.trials.len() as f64;

    let ensemble_avg = match observable {
        ObservableKind::SpinZ => {
            let s_right = observables::spin(&base_right, quad)?[2];
            ens.trials
                .iter()
                .map(|t| t.polarization.spin_sign() * s_right)
                .sum::<f64>()
                / n
        }
        ObservableKind::MomentumZ => {
            // momentum is polarization independent
            observables::momentum(&base_right, quad)?[2]
        }
    };

    let operator_avg = match observable {
        ObservableKind::SpinZ => ens.hbar * trapz_spin_z(&ens.grid, &ens.psi),
        ObservableKind::MomentumZ => ens.hbar * trapz_momentum_z(&ens.grid, &ens.psi),
    };

    Ok(MeanValue {
        observable,
        ensemble_avg,
        operator_avg,
    })
}
