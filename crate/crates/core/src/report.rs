//! Serialization of scan tables and reports.
//!
//! CSV columns are a stable external contract; numbers are written as
//! 17-significant-digit scientific decimals so files round-trip exactly.

use crate::dispersion::ScanRow;
use crate::fields::FieldSample;
use crate::observables::ObservableScanRow;
use std::io::{self, Write};

/// 17 significant digits: lossless decimal for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const DISPERSION_CSV_HEADER: &str = "X,Z,lambda2,k2_over_k02,eps0V2";
pub const FIELDS_CSV_HEADER: &str = "t,z,Ex,Ey,Bx,By,Ax,Ay";
pub const OBSERVABLES_CSV_HEADER: &str =
    "X,W_quad,W_closed,S_quad,S_closed,P_quad,k0S,rel_dW,rel_dS,rel_dP";

pub fn write_dispersion_csv<W: Write>(mut w: W, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(w, "{DISPERSION_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(r.x),
            fmt_f64(r.z),
            fmt_f64(r.lambda2),
            fmt_f64(r.k2_over_k02),
            fmt_f64(r.eps0_v2)
        )?;
    }
    Ok(())
}

pub fn write_fields_csv<W: Write>(mut w: W, samples: &[FieldSample]) -> io::Result<()> {
    writeln!(w, "{FIELDS_CSV_HEADER}")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.z),
            fmt_f64(s.e[0]),
            fmt_f64(s.e[1]),
            fmt_f64(s.b[0]),
            fmt_f64(s.b[1]),
            fmt_f64(s.a_pot[0]),
            fmt_f64(s.a_pot[1])
        )?;
    }
    Ok(())
}

pub fn write_observables_csv<W: Write>(mut w: W, rows: &[ObservableScanRow]) -> io::Result<()> {
    writeln!(w, "{OBSERVABLES_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.x),
            fmt_f64(r.w_quad),
            fmt_f64(r.w_closed),
            fmt_f64(r.s_quad),
            fmt_f64(r.s_closed),
            fmt_f64(r.p_quad),
            fmt_f64(r.k0_s),
            fmt_f64(r.rel_dw),
            fmt_f64(r.rel_ds),
            fmt_f64(r.rel_dp)
        )?;
    }
    Ok(())
}

/// Binary layout of a dumped tensor: three little-endian u64 (n1, n2, 9)
/// followed by n1*n2*9 complex entries as interleaved (re, im) f64 pairs,
/// slot-2 index fastest, then the 3x3 component block.
pub fn write_tensor_binary<W: Write>(
    mut w: W,
    n1: u64,
    n2: u64,
    values: &[num_complex::Complex64],
) -> io::Result<()> {
    w.write_all(&n1.to_le_bytes())?;
    w.write_all(&n2.to_le_bytes())?;
    w.write_all(&9u64.to_le_bytes())?;
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}
