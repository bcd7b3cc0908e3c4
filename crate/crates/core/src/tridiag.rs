//! Tridiagonal elimination (Thomas algorithm) without pivoting.
//!
//! Every implicit stage of the solver produces a diagonally dominant
//! system, for which elimination without pivoting is stable.

use crate::{Error, Result};

/// Reusable scratch space for repeated solves of the same size.
#[derive(Debug, Clone, Default)]
pub struct Tridiagonal {
    /// Sub-diagonal; `lower[0]` is ignored.
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    /// Super-diagonal; `upper[n - 1]` is ignored.
    pub upper: Vec<f64>,
    scratch: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Solve in place: `rhs` is overwritten with the solution.
    pub fn solve_in_place(&mut self, rhs: &mut [f64]) -> Result<()> {
        let n = self.diag.len();
        assert_eq!(rhs.len(), n, "rhs length mismatch");
        if n == 0 {
            return Ok(());
        }
        self.scratch.resize(n, 0.0);
        let c = &mut self.scratch;

        let mut pivot = self.diag[0];
        check_pivot(0, pivot)?;
        c[0] = self.upper[0] / pivot;
        rhs[0] /= pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            check_pivot(i, pivot)?;
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= c[i] * rhs[i + 1];
        }
        Ok(())
    }

    /// `A x` for the stored matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

#[inline]
fn check_pivot(row: usize, pivot: f64) -> Result<()> {
    if pivot.is_finite() && pivot.abs() > f64::MIN_POSITIVE {
        Ok(())
    } else {
        Err(Error::Singular { row, pivot })
    }
}
