//! Uniform 1D sampling grid with trapezoidal weights.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform grid `z_i = lo + i * step`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub step: f64,
    pub n: usize,
}

impl Grid {
    /// Grid covering `[lo, hi]` with spacing at most `max_step`.
    pub fn from_span(lo: f64, hi: f64, max_step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo && max_step > 0.0) {
            return Err(Error::Domain(format!(
                "grid span [{lo}, {hi}] with max step {max_step} is invalid"
            )));
        }
        let n = ((hi - lo) / max_step).ceil() as usize + 1;
        let n = n.max(2);
        Ok(Self {
            lo,
            step: (hi - lo) / (n - 1) as f64,
            n,
        })
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.lo + self.step * (self.n - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.lo + self.step * i as f64
    }

    /// Trapezoidal quadrature weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.step
        } else {
            self.step
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.lo <= lo && self.hi() >= hi
    }

    /// First node index at or after `z`, clamped to the grid.
    pub fn index_at_or_after(&self, z: f64) -> usize {
        if z <= self.lo {
            return 0;
        }
        (((z - self.lo) / self.step).ceil() as usize).min(self.n - 1)
    }

    /// Last node index at or before `z`, clamped to the grid.
    pub fn index_at_or_before(&self, z: f64) -> usize {
        if z >= self.hi() {
            return self.n - 1;
        }
        ((z - self.lo) / self.step).floor().max(0.0) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn span_is_honored() {
        let g = Grid::from_span(-2.0, 3.0, 0.3).unwrap();
        assert!(g.step <= 0.3);
        assert_relative_eq!(g.hi(), 3.0, max_relative = 1e-15);
        assert_eq!(g.point(0), -2.0);
    }

    #[test]
    fn trapezoid_weights_integrate_constants_exactly() {
        let g = Grid::from_span(0.0, 1.0, 0.01).unwrap();
        let total: f64 = (0..g.n).map(|i| g.weight(i)).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn index_clamping() {
        let g = Grid::from_span(0.0, 10.0, 1.0).unwrap();
        assert_eq!(g.index_at_or_after(-5.0), 0);
        assert_eq!(g.index_at_or_before(50.0), g.n - 1);
        assert_eq!(g.index_at_or_after(2.5), 3);
        assert_eq!(g.index_at_or_before(2.5), 2);
    }
}
