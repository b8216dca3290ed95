//! Adaptive quadrature on finite windows.
//!
//! The integrands in this crate are smooth and exponentially localized
//! (powers of sech riding a bounded carrier), so a globally adaptive
//! Gauss-Kronrod 7-15 scheme converges in a handful of bisections. The
//! embedded 7-point Gauss rule supplies the per-panel error estimate.

use crate::error::{Error, Result};

/// Closed integration window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Fails unless `lo < hi` and both endpoints are finite.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!(
                "interval [{lo}, {hi}] must be finite with lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Tolerances and the subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    /// Defaults tuned for smooth, exponentially localized integrands.
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) {
            return Err(Error::Domain("quadrature tolerances must be >= 0".into()));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::Domain(
                "at least one of abs_tol, rel_tol must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae on [-1, 1] (positive half) with the embedded
// 7-point Gauss weights; the classical QUADPACK QK15 pair.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod 7-15 evaluation: returns (kronrod, error_estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = f_center;
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        let sum = f1 + f2;
        kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }

    // Scaled error in the QUADPACK fashion: sharpens the raw |K - G|
    // difference using the deviation of f from its mean.
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fv[7] - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let raw = ((kronrod - gauss) * half).abs();
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = raw;
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }

    (kronrod * half, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrate `f` over `window` to the tolerance in `spec`.
///
/// Globally adaptive: the panel with the largest error estimate is bisected
/// until `sum(err) <= max(abs_tol, rel_tol * |sum(value)|)`. The final sum
/// runs over panels ordered by left endpoint, so the result is a pure
/// function of the inputs.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    window: Interval,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let (value, error) = gk15(&f, window.lo, window.hi);
    let mut panels = vec![Panel {
        a: window.lo,
        b: window.hi,
        value,
        error,
    }];
    let mut splits = 0u32;

    loop {
        let total: f64 = sorted_sum(&panels, |p| p.value);
        let err_total: f64 = panels.iter().map(|p| p.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err_total <= tol {
            return Ok(total);
        }
        if splits >= spec.max_subdivisions {
            return Err(Error::SubdivisionLimit {
                estimate: total,
                error_bound: err_total,
                max_subdivisions: spec.max_subdivisions,
            });
        }

        // Bisect the worst panel; ties resolve to the leftmost.
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| {
                p.error
                    .partial_cmp(&q.error)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(j.cmp(i))
            })
            .map(|(i, _)| i)
            .expect("panel list is never empty");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval exhausted at machine precision; accept what we have.
            return Ok(sorted_sum(&panels, |p| p.value));
        }
        let (lv, le) = gk15(&f, a, mid);
        let (rv, re) = gk15(&f, mid, b);
        panels[worst] = Panel {
            a,
            b: mid,
            value: lv,
            error: le,
        };
        panels.push(Panel {
            a: mid,
            b,
            value: rv,
            error: re,
        });
        splits += 1;
    }
}

fn sorted_sum<F: Fn(&Panel) -> f64>(panels: &[Panel], pick: F) -> f64 {
    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| {
        panels[i]
            .a
            .partial_cmp(&panels[j].a)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order.into_iter().map(|i| pick(&panels[i])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn default_window() -> Interval {
        Interval::new(-40.0, 40.0).unwrap()
    }

    #[test]
    fn zero_integrand_is_zero() {
        let v = integrate(|_| 0.0, default_window(), &QuadratureSpec::default()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn sech_squared_integrates_to_two() {
        // antiderivative tanh(z): tanh(40) - tanh(-40) = 2 to beyond f64
        let v = integrate(
            |z: f64| {
                let s = 1.0 / z.cosh();
                s * s
            },
            default_window(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn sech_fourth_integrates_to_four_thirds() {
        // antiderivative tanh - tanh^3/3
        let v = integrate(
            |z: f64| (1.0 / z.cosh()).powi(4),
            default_window(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(v, 4.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn subdivision_limit_reported() {
        let spec = QuadratureSpec {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_subdivisions: 1,
        };
        let err = integrate(
            |z: f64| {
                let s = 1.0 / z.cosh();
                s * s
            },
            default_window(),
            &spec,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SubdivisionLimit { .. }));
    }

    #[test]
    fn rejects_degenerate_window_and_spec() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        let bad = QuadratureSpec {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_subdivisions: 10,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn oscillatory_integrand_converges() {
        // int cos(10 z) sech(z)^2 dz = pi * 10 / sinh(pi * 10 / 2)
        let v = integrate(
            |z: f64| {
                let s = 1.0 / z.cosh();
                (10.0 * z).cos() * s * s
            },
            default_window(),
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = std::f64::consts::PI * 10.0 / (std::f64::consts::PI * 5.0).sinh();
        assert_abs_diff_eq!(v, exact, epsilon = 1e-10);
    }
}
