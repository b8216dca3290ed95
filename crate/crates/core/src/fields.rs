//! Analytic soliton fields and their consistency checks.
//!
//! The electric field is a sech envelope riding a circularly polarized
//! carrier; the transversal vector potential follows from integrating the
//! field in time by parts, which produces an asymptotic series in the
//! small parameter `lambda = kV/omega` truncated after the printed O(lambda)
//! term. The magnetic field is the curl of that truncated potential.
//!
//! Left-polarized solutions come from the right-polarized ones by the
//! basis transposition `e_R -> e'_L`, `e_L -> e'_R`.

use crate::dispersion::{Medium, Polarization, SolitonParams};
use crate::error::{Error, Result};
use crate::numerics::{derivative, sech, DiffOrder};
use crate::vec3::{norm, scale, sub, Vec3};
use serde::{Deserialize, Serialize};

/// Point (t, z) where fields are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, z: f64) -> Self {
        Self { t, z }
    }
}

/// Truncation order of the vector potential series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialOrder {
    /// Envelope term only.
    Leading,
    /// Envelope term plus the O(lambda) tail correction.
    FirstOrderLambda,
}

/// The four rotating transverse unit vectors at carrier phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationBasis {
    /// `(cos phi, sin phi, 0)` - right circular.
    pub e_r: Vec3,
    /// `(-sin phi, cos phi, 0)` - the quadrature partner of `e_r`,
    /// fixed by requiring the leading term of `-int E dt` to be
    /// `(A/w) sech * e_l`.
    pub e_l: Vec3,
    /// `(cos phi, -sin phi, 0)` - primed right.
    pub e_r_prime: Vec3,
    /// `(sin phi, cos phi, 0)` - primed left.
    pub e_l_prime: Vec3,
}

/// Carrier phase `w t - k0 (z - center) + phase0`.
pub fn phase(p: &SolitonParams, pt: &SpacetimePoint) -> f64 {
    p.omega * pt.t - p.carrier_k * (pt.z - p.center) + p.phase
}

/// Rotating basis vectors at carrier phase `phi`.
pub fn basis_vectors(phi: f64) -> PolarizationBasis {
    let (s, c) = phi.sin_cos();
    PolarizationBasis {
        e_r: [c, s, 0.0],
        e_l: [-s, c, 0.0],
        e_r_prime: [c, -s, 0.0],
        e_l_prime: [s, c, 0.0],
    }
}

/// Envelope argument `k (z - center - V t)`.
#[inline]
fn envelope_arg(p: &SolitonParams, pt: &SpacetimePoint) -> f64 {
    p.envelope_k * (pt.z - p.center - p.velocity * pt.t)
}

/// Electric field at (t, z): `A sech(k xi)` times the rotating unit vector
/// of the soliton's polarization.
pub fn electric_field(p: &SolitonParams, pt: &SpacetimePoint) -> Vec3 {
    let env = p.amplitude * sech(envelope_arg(p, pt));
    let basis = basis_vectors(phase(p, pt));
    let dir = match p.polarization {
        Polarization::Right => basis.e_r,
        Polarization::Left => basis.e_l_prime,
    };
    scale(dir, env)
}

/// Leading and first-order basis directions for the potential series.
#[inline]
fn potential_frame(p: &SolitonParams, basis: &PolarizationBasis) -> (Vec3, Vec3) {
    match p.polarization {
        Polarization::Right => (basis.e_l, basis.e_r),
        Polarization::Left => (basis.e_r_prime, basis.e_l_prime),
    }
}

/// Transversal vector potential, truncated at the requested order:
///
/// ```text
/// A_pot = (A/w) sech(k xi) [ e_lead - lambda tanh(k xi) e_first + O(lambda^2) ]
/// ```
pub fn vector_potential(p: &SolitonParams, pt: &SpacetimePoint, order: PotentialOrder) -> Vec3 {
    let u = envelope_arg(p, pt);
    let env = p.amplitude / p.omega * sech(u);
    let basis = basis_vectors(phase(p, pt));
    let (lead, first) = potential_frame(p, &basis);
    let mut a = scale(lead, env);
    if order == PotentialOrder::FirstOrderLambda {
        a = sub(a, scale(first, env * p.lambda * u.tanh()));
    }
    a
}

/// Magnetic field, the exact curl of the first-order potential:
///
/// ```text
/// B = (A/w) sech(k xi) [ e_lead (k0 - k lambda + 2 k lambda tanh^2)
///                      + e_first (k - lambda k0) tanh ]
/// ```
pub fn magnetic_field(p: &SolitonParams, pt: &SpacetimePoint) -> Vec3 {
    let u = envelope_arg(p, pt);
    let th = u.tanh();
    let env = p.amplitude / p.omega * sech(u);
    let basis = basis_vectors(phase(p, pt));
    let (lead, first) = potential_frame(p, &basis);
    let lead_coeff = p.carrier_k - p.envelope_k * p.lambda * (1.0 - 2.0 * th * th);
    let first_coeff = (p.envelope_k - p.lambda * p.carrier_k) * th;
    let mut b = scale(lead, env * lead_coeff);
    b[0] += env * first_coeff * first[0];
    b[1] += env * first_coeff * first[1];
    b
}

/// Finite-difference step for field derivatives:
/// `1e-4 * min(1/k, 1/k0)`, small against the fastest oscillation.
pub fn fd_step(p: &SolitonParams) -> f64 {
    1e-4 * (1.0 / p.envelope_k).min(1.0 / p.carrier_k)
}

/// Curl of the first-order vector potential by central differences in z.
/// For transversal fields depending on z only, `curl A = (-dAy/dz, dAx/dz, 0)`.
pub fn curl_potential_fd(p: &SolitonParams, pt: &SpacetimePoint) -> Vec3 {
    let h = fd_step(p);
    let t = pt.t;
    let day_dz = derivative(
        |z| vector_potential(p, &SpacetimePoint::new(t, z), PotentialOrder::FirstOrderLambda)[1],
        pt.z,
        DiffOrder::First,
        h,
    );
    let dax_dz = derivative(
        |z| vector_potential(p, &SpacetimePoint::new(t, z), PotentialOrder::FirstOrderLambda)[0],
        pt.z,
        DiffOrder::First,
        h,
    );
    [-day_dz, dax_dz, 0.0]
}

/// One sampled row of the field table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub t: f64,
    pub z: f64,
    pub e: Vec3,
    pub b: Vec3,
    pub a_pot: Vec3,
}

/// Sample all three fields along z at fixed t (first-order potential).
pub fn sample_fields(p: &SolitonParams, t: f64, z_lo: f64, z_hi: f64, n: usize) -> Vec<FieldSample> {
    let step = if n > 1 { (z_hi - z_lo) / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .map(|i| {
            let pt = SpacetimePoint::new(t, z_lo + step * i as f64);
            FieldSample {
                t: pt.t,
                z: pt.z,
                e: electric_field(p, &pt),
                b: magnetic_field(p, &pt),
                a_pot: vector_potential(p, &pt, PotentialOrder::FirstOrderLambda),
            }
        })
        .collect()
}

/// Rectangular (t, z) evaluation grid for residual scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec2D {
    pub t_lo: f64,
    pub t_hi: f64,
    pub nt: usize,
    pub z_lo: f64,
    pub z_hi: f64,
    pub nz: usize,
}

impl GridSpec2D {
    /// Grid centered on the soliton: `nt x nz` points spanning
    /// `periods` carrier periods in t and `half_widths` envelope widths
    /// either side of the center in z.
    pub fn centered(p: &SolitonParams, periods: f64, half_widths: f64, nt: usize, nz: usize) -> Self {
        let t_hi = periods * std::f64::consts::TAU / p.omega;
        let half = half_widths / p.envelope_k;
        Self {
            t_lo: 0.0,
            t_hi,
            nt,
            z_lo: p.center - half,
            z_hi: p.center + half,
            nz,
        }
    }

    pub fn dt(&self) -> f64 {
        (self.t_hi - self.t_lo) / (self.nt.max(2) - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_hi - self.z_lo) / (self.nz.max(2) - 1) as f64
    }
}

/// Wave-equation defect of the truncated ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// max |d2z E - d2t(eps E)| over the grid, normalized by the largest
    /// single term magnitude seen anywhere on the grid.
    pub max_rel_residual: f64,
    /// RMS of the same pointwise residual, same normalization.
    pub rms_rel_residual: f64,
    /// Transversal z-only fields have no x/y dependence and no z
    /// components, so both divergences vanish identically.
    pub div_eps_e: f64,
    pub div_b: f64,
    pub grid_spec: GridSpec2D,
}

/// Measure how well the analytic ansatz satisfies the nonlinear wave
/// equation `rot^2 E = -d2t [eps(E) E]`, which for transversal z-dependent
/// fields reduces to `d2z E = d2t [eps(E) E]`.
///
/// Both sides are built by central differences on the exact fields. The
/// residual is normalized by the largest individual term magnitude on the
/// grid, which avoids dividing by zero at field nodes.
pub fn maxwell_residual(
    medium: &Medium,
    p: &SolitonParams,
    grid: &GridSpec2D,
) -> Result<ResidualReport> {
    use rayon::prelude::*;

    let limit_z = 1.0 / (10.0 * p.carrier_k);
    let limit_t = 1.0 / (10.0 * p.omega);
    if grid.dz() > limit_z {
        return Err(Error::GridTooCoarse {
            spacing: grid.dz(),
            limit: limit_z,
        });
    }
    if grid.dt() > limit_t {
        return Err(Error::GridTooCoarse {
            spacing: grid.dt(),
            limit: limit_t,
        });
    }

    let h = fd_step(p);
    let eps_e = |t: f64, z: f64, comp: usize| -> f64 {
        let e = electric_field(p, &SpacetimePoint::new(t, z));
        medium.permittivity(norm(e) * norm(e)) * e[comp]
    };

    // per-row (fixed t) pass, reduced deterministically afterwards
    let rows: Vec<(f64, f64, f64)> = (0..grid.nt)
        .into_par_iter()
        .map(|it| {
            let t = grid.t_lo + grid.dt() * it as f64;
            let mut max_term = 0.0f64;
            let mut max_res = 0.0f64;
            let mut sum_sq = 0.0f64;
            for iz in 0..grid.nz {
                let z = grid.z_lo + grid.dz() * iz as f64;
                for comp in 0..2 {
                    let d2z = derivative(
                        |zz| electric_field(p, &SpacetimePoint::new(t, zz))[comp],
                        z,
                        DiffOrder::Second,
                        h,
                    );
                    let d2t = derivative(|tt| eps_e(tt, z, comp), t, DiffOrder::Second, h);
                    max_term = max_term.max(d2z.abs()).max(d2t.abs());
                    let r = d2z - d2t;
                    max_res = max_res.max(r.abs());
                    sum_sq += r * r;
                }
            }
            (max_term, max_res, sum_sq)
        })
        .collect();

    let max_term = rows.iter().fold(0.0f64, |a, r| a.max(r.0)).max(f64::MIN_POSITIVE);
    let max_res = rows.iter().fold(0.0f64, |a, r| a.max(r.1));
    let sum_sq: f64 = rows.iter().map(|r| r.2).sum();
    let n_samples = (grid.nt * grid.nz * 2) as f64;

    Ok(ResidualReport {
        max_rel_residual: max_res / max_term,
        rms_rel_residual: (sum_sq / n_samples).sqrt() / max_term,
        div_eps_e: 0.0,
        div_b: 0.0,
        grid_spec: *grid,
    })
}
