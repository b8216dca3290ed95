//! Central finite differences for scalar functions.

/// Derivative order supported by [`derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
}

/// Central-difference estimate of f'(x) or f''(x) with truncation error
/// O(step^2).
///
/// Stencils: 3-point symmetric for both orders,
/// `(f(x+h) - f(x-h)) / 2h` and `(f(x+h) - 2 f(x) + f(x-h)) / h^2`.
/// Step selection is the caller's job; for soliton fields use
/// [`crate::fields::fd_step`].
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: DiffOrder, step: f64) -> f64 {
    debug_assert!(step > 0.0, "finite-difference step must be positive");
    match order {
        DiffOrder::First => (f(x + step) - f(x - step)) / (2.0 * step),
        DiffOrder::Second => (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step),
    }
}

/// Five-point first derivative of uniformly sampled data, O(h^4) in the
/// interior, one-sided O(h) at the two outermost points on each side.
///
/// Used where sampled fields oscillate at the carrier scale and the
/// 3-point truncation error would dominate an identity check.
pub fn grid_derivative(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        // degenerate fallback: forward/backward differences
        for i in 0..n {
            out[i] = match i {
                0 if n > 1 => (values[1] - values[0]) / step,
                i if i + 1 == n && n > 1 => (values[i] - values[i - 1]) / step,
                _ => 0.0,
            };
        }
        return out;
    }
    let c = 1.0 / (12.0 * step);
    for i in 2..n - 2 {
        out[i] = c * (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2]);
    }
    out[0] = (values[1] - values[0]) / step;
    out[1] = (values[2] - values[0]) / (2.0 * step);
    out[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * step);
    out[n - 1] = (values[n - 1] - values[n - 2]) / step;
    out
}
