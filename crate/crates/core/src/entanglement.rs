//! Two-soliton singlet states and their stochastic ensembles.
//!
//! The singlet pairs a left- and a right-polarized soliton into the
//! antisymmetrized two-point tensor
//!
//! ```text
//! phi12(z1, z2) = [ phi_L(-z1) (x) phi_R(z2) - phi_R(-z1) (x) phi_L(z2) ] / sqrt(2)
//! ```
//!
//! with the slot-1 argument mirrored, which reverses the slot-1 momentum
//! and makes both total spin and total momentum vanish. Swapping the L
//! and R constituent labels negates every entry; that label exchange is
//! the antisymmetry this module guarantees exactly.
//!
//! Tensors are stored densely, `values[(i1 n2 + i2) 9 + 3 a + b]`, with a
//! configurable entry cap to keep desk-scale runs in memory.

use crate::dispersion::{Polarization, SolitonParams};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::numerics::{Interval, RandomStream};
use crate::quantization::{phi_at, solve_nu, SUPPORT_HALF_WIDTHS};
use num_complex::Complex64;
use serde::Serialize;

/// Dense complex 3x3-valued field over a pair of grids.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorState {
    pub grid1: Grid,
    pub grid2: Grid,
    /// `values[(i1 * n2 + i2) * 9 + 3 a + b]`.
    pub values: Vec<Complex64>,
    pub hbar: f64,
}

/// Which slot of the tensor an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    One,
    Two,
}

/// Which product branch of the singlet to build in isolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `phi_L(-z1) (x) phi_R(z2) / sqrt(2)`
    LeftRight,
    /// `phi_R(-z1) (x) phi_L(z2) / sqrt(2)`
    RightLeft,
}

/// Grid construction and memory policy for tensor states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TensorSpec {
    /// Envelope widths each slot grid must cover either side of a
    /// constituent's peak. The envelope at 25 widths is already below
    /// 1e-10 of the peak; 40 exhausts double precision.
    pub coverage_over_k: f64,
    /// Slot grid padding beyond the covered supports, envelope widths.
    pub pad_over_k: f64,
    /// Slot grid step as a fraction of the carrier length `1/k0`. Coarser
    /// than the one-particle default: the tensor is quadratic in the node
    /// count and its observables tolerate percent-level quadrature.
    pub step_fraction_carrier: f64,
    /// Refuse tensors with more complex entries than this.
    pub max_entries: u64,
    /// Per-trial support half-width used during ensemble accumulation,
    /// envelope widths.
    pub support_over_k: f64,
}

impl Default for TensorSpec {
    fn default() -> Self {
        Self {
            coverage_over_k: SUPPORT_HALF_WIDTHS,
            pad_over_k: 4.0,
            step_fraction_carrier: 1.0 / 6.0,
            max_entries: 40_000_000,
            support_over_k: SUPPORT_HALF_WIDTHS,
        }
    }
}

/// A built singlet with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletState {
    pub state: TensorState,
    /// Normalization constant shared by both constituents.
    pub nu: f64,
    /// Polarization overlap `<phi_L, phi_R>`; the carrier makes it
    /// oscillatory and therefore small, but it is measured, not assumed.
    pub overlap_lr: Complex64,
}

fn check_pair(p_left: &SolitonParams, p_right: &SolitonParams) -> Result<()> {
    if p_left.polarization != Polarization::Left || p_right.polarization != Polarization::Right {
        return Err(Error::Domain(
            "singlet constituents must be (left, right) polarized in that order".into(),
        ));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if !(close(p_left.omega, p_right.omega)
        && close(p_left.x, p_right.x)
        && p_left.medium == p_right.medium)
    {
        return Err(Error::Domain(
            "singlet constituents must share omega, steepness and medium".into(),
        ));
    }
    Ok(())
}

fn checked_len(n1: usize, n2: usize, cap: u64) -> Result<usize> {
    let entries = n1 as u64 * n2 as u64 * 9;
    if entries > cap {
        return Err(Error::TensorTooLarge { entries, cap });
    }
    Ok(entries as usize)
}

/// Default slot grids for a singlet of these constituents: each grid
/// covers the (mirrored) supports of both solitons plus padding.
pub fn singlet_grids(
    p_left: &SolitonParams,
    p_right: &SolitonParams,
    spec: &TensorSpec,
) -> Result<(Grid, Grid)> {
    let k = p_left.envelope_k;
    let reach = (spec.coverage_over_k + spec.pad_over_k) / k;
    let step = spec.step_fraction_carrier / p_left.carrier_k;
    let (c_l, c_r) = (p_left.center, p_right.center);
    // slot 1 sees the mirrored envelopes, peaking at -center
    let lo1 = (-c_l).min(-c_r) - reach;
    let hi1 = (-c_l).max(-c_r) + reach;
    let grid1 = Grid::from_span(lo1, hi1, step)?;
    let lo2 = c_l.min(c_r) - reach;
    let hi2 = c_l.max(c_r) + reach;
    let grid2 = Grid::from_span(lo2, hi2, step)?;
    Ok((grid1, grid2))
}

/// Sample a constituent on a slot grid, optionally mirrored (slot 1).
fn slot_samples(p: &SolitonParams, nu: f64, grid: &Grid, mirrored: bool) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(3 * grid.n);
    for z in grid.points() {
        let arg = if mirrored { -z } else { z };
        out.extend_from_slice(&phi_at(p, nu, arg));
    }
    out
}

fn grid_must_cover(grid: &Grid, lo: f64, hi: f64) -> Result<()> {
    if !grid.covers(lo, hi) {
        return Err(Error::GridTooSmall {
            lo: grid.lo,
            hi: grid.hi(),
            need_lo: lo,
            need_hi: hi,
        });
    }
    Ok(())
}

/// Assemble the singlet tensor of a left/right pair on the given grids.
///
/// Both constituents are normalized to hbar with a shared `nu` (their
/// envelopes are mirror images, so the shape integrals coincide). Slot-1
/// fields are evaluated at the mirrored argument `-z1`.
pub fn build_singlet(
    p_left: &SolitonParams,
    p_right: &SolitonParams,
    grids: (Grid, Grid),
    spec: &TensorSpec,
) -> Result<SingletState> {
    check_pair(p_left, p_right)?;
    let (grid1, grid2) = grids;
    let len = checked_len(grid1.n, grid2.n, spec.max_entries)?;

    let k = p_left.envelope_k;
    let half = spec.coverage_over_k / k;
    for p in [p_left, p_right] {
        grid_must_cover(&grid1, -p.center - half, -p.center + half)?;
        grid_must_cover(&grid2, p.center - half, p.center + half)?;
    }

    // nu from the left constituent on a matching one-particle grid;
    // identical for the right one by the polarization mirror
    let norm_half = SUPPORT_HALF_WIDTHS / k;
    let norm_grid = Grid::from_span(
        p_left.center - norm_half,
        p_left.center + norm_half,
        grid2.step,
    )?;
    let nu = solve_nu(p_left, &norm_grid)?;

    let u_l = slot_samples(p_left, nu, &grid1, true);
    let u_r = slot_samples(p_right, nu, &grid1, true);
    let v_r = slot_samples(p_right, nu, &grid2, false);
    let v_l = slot_samples(p_left, nu, &grid2, false);

    let mut values = vec![Complex64::new(0.0, 0.0); len];
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i1 in 0..grid1.n {
        for i2 in 0..grid2.n {
            let out = &mut values[(i1 * grid2.n + i2) * 9..][..9];
            for a in 0..3 {
                for b in 0..3 {
                    out[3 * a + b] = inv_sqrt2
                        * (u_l[3 * i1 + a] * v_r[3 * i2 + b]
                            - u_r[3 * i1 + a] * v_l[3 * i2 + b]);
                }
            }
        }
    }

    // polarization overlap <phi_L, phi_R> on the slot-2 grid
    let mut overlap = Complex64::new(0.0, 0.0);
    for i2 in 0..grid2.n {
        let w = grid2.weight(i2);
        for c in 0..3 {
            overlap += w * v_l[3 * i2 + c].conj() * v_r[3 * i2 + c];
        }
    }

    Ok(SingletState {
        state: TensorState {
            grid1,
            grid2,
            values,
            hbar: p_left.medium.hbar,
        },
        nu,
        overlap_lr: overlap,
    })
}

/// One product branch of the singlet (diagnostic; carries the same
/// `1/sqrt(2)` prefactor as inside the full state).
pub fn build_singlet_branch(
    p_left: &SolitonParams,
    p_right: &SolitonParams,
    grids: (Grid, Grid),
    spec: &TensorSpec,
    branch: Branch,
) -> Result<TensorState> {
    check_pair(p_left, p_right)?;
    let (grid1, grid2) = grids;
    let len = checked_len(grid1.n, grid2.n, spec.max_entries)?;
    let k = p_left.envelope_k;
    let norm_half = SUPPORT_HALF_WIDTHS / k;
    let norm_grid = Grid::from_span(
        p_left.center - norm_half,
        p_left.center + norm_half,
        grid2.step,
    )?;
    let nu = solve_nu(p_left, &norm_grid)?;

    let (slot1, slot2) = match branch {
        Branch::LeftRight => (p_left, p_right),
        Branch::RightLeft => (p_right, p_left),
    };
    let u = slot_samples(slot1, nu, &grid1, true);
    let v = slot_samples(slot2, nu, &grid2, false);

    let mut values = vec![Complex64::new(0.0, 0.0); len];
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i1 in 0..grid1.n {
        for i2 in 0..grid2.n {
            let out = &mut values[(i1 * grid2.n + i2) * 9..][..9];
            for a in 0..3 {
                for b in 0..3 {
                    out[3 * a + b] = inv_sqrt2 * u[3 * i1 + a] * v[3 * i2 + b];
                }
            }
        }
    }
    Ok(TensorState {
        grid1,
        grid2,
        values,
        hbar: p_left.medium.hbar,
    })
}

impl TensorState {
    #[inline]
    fn entry(&self, i1: usize, i2: usize, a: usize, b: usize) -> Complex64 {
        self.values[(i1 * self.grid2.n + i2) * 9 + 3 * a + b]
    }

    /// Double trapezoidal `int int sum_ab |T_ab|^2 dz1 dz2`.
    pub fn norm_squared(&self) -> f64 {
        let n2 = self.grid2.n;
        (0..self.grid1.n)
            .map(|i1| {
                let w1 = self.grid1.weight(i1);
                let row = &self.values[i1 * n2 * 9..(i1 + 1) * n2 * 9];
                let mut acc = 0.0;
                for i2 in 0..n2 {
                    let w2 = self.grid2.weight(i2);
                    let cell = &row[i2 * 9..i2 * 9 + 9];
                    let s: f64 = cell.iter().map(|v| v.norm_sqr()).sum();
                    acc += w1 * w2 * s;
                }
                acc
            })
            .sum()
    }

    /// Expectation of the z spin operator acting on one slot, divided by
    /// `hbar^2`. For a product of hbar-normalized constituents this lands
    /// on the classical per-soliton spin integral.
    pub fn slot_spin_z(&self, slot: Slot) -> f64 {
        let mut acc = 0.0;
        for i1 in 0..self.grid1.n {
            let w1 = self.grid1.weight(i1);
            for i2 in 0..self.grid2.n {
                let w = w1 * self.grid2.weight(i2);
                for other in 0..3 {
                    // spin on slot 1 contracts index a, on slot 2 index b
                    let (x, y) = match slot {
                        Slot::One => (self.entry(i1, i2, 0, other), self.entry(i1, i2, 1, other)),
                        Slot::Two => (self.entry(i1, i2, other, 0), self.entry(i1, i2, other, 1)),
                    };
                    acc += w * 2.0 * (x.conj() * y).im;
                }
            }
        }
        acc * self.hbar / (self.hbar * self.hbar)
    }

    /// Expectation of `-i hbar d/dz` acting on one slot, divided by
    /// `hbar^2`. Five-point stencil on the slot coordinate, interior
    /// nodes only (fields vanish at the edges).
    pub fn slot_momentum_z(&self, slot: Slot) -> f64 {
        let (n_d, n_o, step) = match slot {
            Slot::One => (self.grid1.n, self.grid2.n, self.grid1.step),
            Slot::Two => (self.grid2.n, self.grid1.n, self.grid2.step),
        };
        if n_d < 5 {
            return 0.0;
        }
        let c = 1.0 / (12.0 * step);
        let mut acc = 0.0;
        for id in 2..n_d - 2 {
            let wd = match slot {
                Slot::One => self.grid1.weight(id),
                Slot::Two => self.grid2.weight(id),
            };
            for io in 0..n_o {
                let wo = match slot {
                    Slot::One => self.grid2.weight(io),
                    Slot::Two => self.grid1.weight(io),
                };
                let w = wd * wo;
                for a in 0..3 {
                    for b in 0..3 {
                        let at = |j: usize| match slot {
                            Slot::One => self.entry(j, io, a, b),
                            Slot::Two => self.entry(io, j, a, b),
                        };
                        let d = (-at(id + 2) + at(id + 1) * 8.0 - at(id - 1) * 8.0 + at(id - 2)) * c;
                        acc += w * (at(id).conj() * d).im;
                    }
                }
            }
        }
        acc * self.hbar / (self.hbar * self.hbar)
    }
}

/// Norm of the singlet tensor (double integral of the squared magnitude).
pub fn singlet_norm(s: &SingletState) -> f64 {
    s.state.norm_squared()
}

/// Total spin-z and momentum-z expectations (both slots summed), each
/// normalized by `hbar^2`; compatible with zero for the singlet.
pub fn singlet_observables(s: &SingletState) -> (f64, f64) {
    let spin = s.state.slot_spin_z(Slot::One) + s.state.slot_spin_z(Slot::Two);
    let momentum = s.state.slot_momentum_z(Slot::One) + s.state.slot_momentum_z(Slot::Two);
    (spin, momentum)
}

/// Stochastic two-particle wave function, Eq.-style
/// `Psi_N = (hbar^2 N)^(-1/2) sum_j phi12_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleEnsemble {
    pub trials: u64,
    pub seed: u64,
    pub state: TensorState,
}

/// Build the dense two-particle ensemble tensor.
///
/// Trial `j` draws `(center, phase)` for each slot from
/// `RandomStream::new(seed, j)` (four draws: slot-1 center and phase, then
/// slot-2). Slot-1 constituents are placed at the negated center so the
/// mirrored envelope peaks inside the drawn interval. Accumulation walks
/// trials in index order within each tensor row, so the result does not
/// depend on the worker count.
pub fn build_two_particle_ensemble(
    p_left: &SolitonParams,
    p_right: &SolitonParams,
    trials: u64,
    seed: u64,
    center_dist: Interval,
    spec: &TensorSpec,
) -> Result<TwoParticleEnsemble> {
    use rayon::prelude::*;

    check_pair(p_left, p_right)?;
    if trials == 0 {
        return Err(Error::Domain("ensemble needs at least one trial".into()));
    }
    let k = p_left.envelope_k;
    let support = spec.support_over_k / k;
    let reach = (spec.support_over_k + spec.pad_over_k) / k;
    let step = spec.step_fraction_carrier / p_left.carrier_k;
    // slot 1 holds mirrored envelopes: centers land inside the same
    // interval after negating the constituent position
    let grid1 = Grid::from_span(center_dist.lo - reach, center_dist.hi + reach, step)?;
    let grid2 = grid1;
    let len = checked_len(grid1.n, grid2.n, spec.max_entries)?;

    let half = SUPPORT_HALF_WIDTHS / k;
    let norm_grid = Grid::from_span(p_left.center - half, p_left.center + half, step)?;
    let nu = solve_nu(p_left, &norm_grid)?;

    let hbar = p_left.medium.hbar;
    let prefactor = std::f64::consts::FRAC_1_SQRT_2 / (hbar * hbar * trials as f64).sqrt();

    struct TrialSlots {
        lo1: usize,
        lo2: usize,
        u_l: Vec<Complex64>,
        u_r: Vec<Complex64>,
        v_r: Vec<Complex64>,
        v_l: Vec<Complex64>,
    }

    let sample_window = |grid: &Grid, center: f64| -> (usize, usize) {
        (
            grid.index_at_or_after(center - support),
            grid.index_at_or_before(center + support),
        )
    };

    let build_trial = |j: u64| -> TrialSlots {
        let s = RandomStream::new(seed, j);
        let (c1, s) = s.uniform(center_dist.lo, center_dist.hi);
        let (ph1, s) = s.uniform(0.0, std::f64::consts::TAU);
        let (c2, s) = s.uniform(center_dist.lo, center_dist.hi);
        let (ph2, _) = s.uniform(0.0, std::f64::consts::TAU);

        // slot 1: constituents at -c1 so phi(-z1) peaks at z1 = c1
        let l1 = p_left.with_center(-c1).with_phase(ph1);
        let r1 = p_right.with_center(-c1).with_phase(ph1);
        let l2 = p_left.with_center(c2).with_phase(ph2);
        let r2 = p_right.with_center(c2).with_phase(ph2);

        let (lo1, hi1) = sample_window(&grid1, c1);
        let (lo2, hi2) = sample_window(&grid2, c2);
        let sample = |p: &SolitonParams, lo: usize, hi: usize, grid: &Grid, mirror: bool| {
            let mut out = Vec::with_capacity(3 * (hi - lo + 1));
            for i in lo..=hi {
                let z = grid.point(i);
                out.extend_from_slice(&phi_at(p, nu, if mirror { -z } else { z }));
            }
            out
        };
        TrialSlots {
            lo1,
            lo2,
            u_l: sample(&l1, lo1, hi1, &grid1, true),
            u_r: sample(&r1, lo1, hi1, &grid1, true),
            v_r: sample(&r2, lo2, hi2, &grid2, false),
            v_l: sample(&l2, lo2, hi2, &grid2, false),
        }
    };

    let mut values = vec![Complex64::new(0.0, 0.0); len];
    let n2 = grid2.n;
    let batch = 64u64;
    let mut j0 = 0u64;
    while j0 < trials {
        let j1 = (j0 + batch).min(trials);
        let slots: Vec<TrialSlots> = (j0..j1).map(build_trial).collect();
        values
            .par_chunks_mut(n2 * 9)
            .enumerate()
            .for_each(|(i1, row)| {
                for t in &slots {
                    let n1_pts = t.u_l.len() / 3;
                    if i1 < t.lo1 || i1 >= t.lo1 + n1_pts {
                        continue;
                    }
                    let ua = &t.u_l[3 * (i1 - t.lo1)..][..3];
                    let ub = &t.u_r[3 * (i1 - t.lo1)..][..3];
                    let n2_pts = t.v_r.len() / 3;
                    for i2_rel in 0..n2_pts {
                        let out = &mut row[(t.lo2 + i2_rel) * 9..][..9];
                        let va = &t.v_r[3 * i2_rel..][..3];
                        let vb = &t.v_l[3 * i2_rel..][..3];
                        for a in 0..3 {
                            let pa = prefactor * ua[a];
                            let pb = prefactor * ub[a];
                            for b in 0..3 {
                                out[3 * a + b] += pa * va[b] - pb * vb[b];
                            }
                        }
                    }
                }
            });
        j0 = j1;
    }

    Ok(TwoParticleEnsemble {
        trials,
        seed,
        state: TensorState {
            grid1,
            grid2,
            values,
            hbar,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{solve_params, Medium};
    use crate::quantization::min_feasible_hbar;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn singlet_pair(x: f64) -> (SolitonParams, SolitonParams) {
        let mut medium = Medium::reference();
        let p0 = solve_params(&medium, x, 1.0).unwrap();
        let half = SUPPORT_HALF_WIDTHS / p0.envelope_k;
        let grid = Grid::from_span(-half, half, 0.05 / p0.carrier_k).unwrap();
        medium.hbar = 1.05 * min_feasible_hbar(&p0, &grid);
        let p = solve_params(&medium, x, 1.0).unwrap();
        (
            p.with_polarization(Polarization::Left),
            p.with_polarization(Polarization::Right),
        )
    }

    fn small_spec() -> TensorSpec {
        TensorSpec {
            coverage_over_k: 25.0,
            pad_over_k: 2.0,
            step_fraction_carrier: 1.0 / 4.0,
            max_entries: 40_000_000,
            support_over_k: SUPPORT_HALF_WIDTHS,
        }
    }

    #[test]
    fn constituent_order_is_enforced() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        assert!(build_singlet(&pr, &pl, grids, &spec).is_err());
    }

    #[test]
    fn label_swap_negates_the_tensor() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let s = build_singlet(&pl, &pr, grids, &spec).unwrap();
        // swapping constituent labels is building (R,L) branches in the
        // opposite order: phi12 -> -phi12
        let lr = build_singlet_branch(&pl, &pr, grids, &spec, Branch::LeftRight).unwrap();
        let rl = build_singlet_branch(&pl, &pr, grids, &spec, Branch::RightLeft).unwrap();
        for i in (0..s.state.values.len()).step_by(101) {
            let swapped = rl.values[i] - lr.values[i];
            assert_abs_diff_eq!(swapped.re, -s.state.values[i].re, epsilon = 1e-15);
            assert_abs_diff_eq!(swapped.im, -s.state.values[i].im, epsilon = 1e-15);
        }
    }

    #[test]
    fn self_pairing_vanishes_identically() {
        // antisymmetrizing a branch against an independently built copy of
        // itself kills every entry exactly
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let first = build_singlet_branch(&pl, &pr, grids, &spec, Branch::RightLeft).unwrap();
        let second = build_singlet_branch(&pl, &pr, grids, &spec, Branch::RightLeft).unwrap();
        assert!(first
            .values
            .iter()
            .zip(&second.values)
            .all(|(a, b)| (a - b).norm() == 0.0));
    }

    #[test]
    fn norm_is_hbar_squared_up_to_the_overlap() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let s = build_singlet(&pl, &pr, grids, &spec).unwrap();
        let hbar2 = s.state.hbar * s.state.hbar;
        let norm = singlet_norm(&s);

        // exact finite-grid identity: norm = hbar^2 - |<phi_L, phi_R>|^2
        // (up to trapezoid error), with the overlap oscillatory-small
        let k_ratio = pl.envelope_k / pl.carrier_k;
        assert!(
            (norm / hbar2 - 1.0).abs() <= 10.0 * k_ratio,
            "norm/hbar^2 = {}",
            norm / hbar2
        );
        assert!(s.overlap_lr.norm() / s.state.hbar < 0.1);
    }

    #[test]
    fn norm_is_stable_under_padding_and_common_shifts() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let base = singlet_norm(&build_singlet(&pl, &pr, grids, &spec).unwrap());

        let mut wide = spec;
        wide.pad_over_k = 2.0 * spec.pad_over_k;
        let grids_w = singlet_grids(&pl, &pr, &wide).unwrap();
        let padded = singlet_norm(&build_singlet(&pl, &pr, grids_w, &wide).unwrap());
        assert_relative_eq!(base, padded, max_relative = 1e-10);

        // common global phase of both constituents
        let shifted = singlet_norm(
            &build_singlet(
                &pl.with_phase(0.91),
                &pr.with_phase(0.91),
                grids,
                &spec,
            )
            .unwrap(),
        );
        assert_relative_eq!(base, shifted, max_relative = 1e-10);

        // rigid translation of the pair together with its grids
        let d = 3.25;
        let (pl_t, pr_t) = (pl.with_center(pl.center + d), pr.with_center(pr.center + d));
        let grids_t = singlet_grids(&pl_t, &pr_t, &spec).unwrap();
        let translated = singlet_norm(&build_singlet(&pl_t, &pr_t, grids_t, &spec).unwrap());
        assert_relative_eq!(base, translated, max_relative = 1e-9);
    }

    #[test]
    fn singlet_carries_no_net_spin_or_momentum() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let s = build_singlet(&pl, &pr, grids, &spec).unwrap();
        let (spin, momentum) = singlet_observables(&s);
        let s_scale = crate::observables::spin_closed(&pr).abs();
        let p_scale = pr.carrier_k * s_scale;
        let lam2 = pr.lambda * pr.lambda;
        assert!(
            spin.abs() <= 5.0 * lam2 * s_scale,
            "net spin {spin} vs scale {s_scale}"
        );
        assert!(
            momentum.abs() <= 5.0 * lam2 * p_scale,
            "net momentum {momentum} vs scale {p_scale}"
        );
    }

    #[test]
    fn branch_slot_spin_recovers_half_the_classical_value() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let s_classical = crate::observables::spin_closed(&pr);

        let lr = build_singlet_branch(&pl, &pr, grids, &spec, Branch::LeftRight).unwrap();
        // slot 2 of the L(x)R branch holds the right soliton with branch
        // weight 1/2
        assert_relative_eq!(
            lr.slot_spin_z(Slot::Two),
            0.5 * s_classical,
            max_relative = 1e-6
        );
        let rl = build_singlet_branch(&pl, &pr, grids, &spec, Branch::RightLeft).unwrap();
        assert_relative_eq!(
            rl.slot_spin_z(Slot::Two),
            -0.5 * s_classical,
            max_relative = 1e-6
        );
    }

    #[test]
    fn mirrored_slot_reverses_momentum() {
        let (pl, pr) = singlet_pair(1.0);
        let spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        let lr = build_singlet_branch(&pl, &pr, grids, &spec, Branch::LeftRight).unwrap();
        let p1 = lr.slot_momentum_z(Slot::One);
        let p2 = lr.slot_momentum_z(Slot::Two);
        assert!(p2 > 0.0 && p1 < 0.0);
        assert_relative_eq!(p1, -p2, max_relative = 1e-3);
    }

    #[test]
    fn tensor_cap_is_enforced() {
        let (pl, pr) = singlet_pair(1.0);
        let mut spec = small_spec();
        let grids = singlet_grids(&pl, &pr, &spec).unwrap();
        spec.max_entries = 1000;
        assert!(matches!(
            build_singlet(&pl, &pr, grids, &spec),
            Err(Error::TensorTooLarge { .. })
        ));
    }

    #[test]
    fn two_particle_singles_and_determinism() {
        let (pl, pr) = singlet_pair(1.0);
        let mut spec = small_spec();
        spec.support_over_k = 30.0;
        let size = 1.0 / pl.envelope_k;
        let dist = Interval::new(-10.0 * size, 10.0 * size).unwrap();

        let e1 = build_two_particle_ensemble(&pl, &pr, 1, 5, dist, &spec).unwrap();
        // N = 1 reduces to singlet_norm / hbar^2 ~ 1
        let n1 = e1.state.norm_squared();
        assert!((n1 - 1.0).abs() < 0.05, "N=1 norm {n1}");

        let e2 = build_two_particle_ensemble(&pl, &pr, 6, 5, dist, &spec).unwrap();
        let e3 = build_two_particle_ensemble(&pl, &pr, 6, 5, dist, &spec).unwrap();
        assert_eq!(e2.state.values, e3.state.values);

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| build_two_particle_ensemble(&pl, &pr, 6, 5, dist, &spec).unwrap());
        assert_eq!(single.state.values, e2.state.values);
    }
}
