use crate::util::min_max;
use crate::{Error, Grid, Result};

/// Discrete fields on the staggered mesh plus the simulation clock.
#[derive(Debug, Clone, PartialEq)]
pub struct GasState {
    pub grid: Grid,
    /// Specific volume per cell.
    pub v: Vec<f64>,
    /// Temperature per cell.
    pub theta: Vec<f64>,
    /// Transverse magnetic field per cell.
    pub b: Vec<[f64; 2]>,
    /// Longitudinal velocity per node.
    pub u: Vec<f64>,
    /// Transverse velocity per node.
    pub w: Vec<[f64; 2]>,
    pub t: f64,
    pub step: u64,
}

impl GasState {
    /// The far-field equilibrium `(v, u, theta, b, w) = (1, 0, 1, 0, 0)`.
    pub fn reference(grid: Grid) -> Self {
        Self {
            grid,
            v: vec![1.0; grid.cells],
            theta: vec![1.0; grid.cells],
            b: vec![[0.0; 2]; grid.cells],
            u: vec![0.0; grid.nodes()],
            w: vec![[0.0; 2]; grid.nodes()],
            t: 0.0,
            step: 0,
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        let m = self.grid.cells;
        let n = self.grid.nodes();
        let lens = [
            ("v", self.v.len(), m),
            ("theta", self.theta.len(), m),
            ("b", self.b.len(), m),
            ("u", self.u.len(), n),
            ("w", self.w.len(), n),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(Error::Shape(format!(
                    "field {name} has {got} entries, grid expects {want}"
                )));
            }
        }
        Ok(())
    }

    /// All cells have `v > 0` and `theta > 0` (NaN counts as a violation).
    pub fn is_positive(&self) -> bool {
        self.v.iter().chain(&self.theta).all(|&x| x > 0.0)
    }

    pub fn v_range(&self) -> (f64, f64) {
        min_max(&self.v)
    }

    pub fn theta_range(&self) -> (f64, f64) {
        min_max(&self.theta)
    }

    /// Swap the two transverse components of `b` and `w`.
    pub fn swap_components(&mut self) {
        for b in self.b.iter_mut().chain(self.w.iter_mut()) {
            b.swap(0, 1);
        }
    }

    /// Node velocity averaged to cell `c`.
    #[inline]
    pub fn u_at_cell(&self, c: usize) -> f64 {
        0.5 * (self.u[c] + self.u[c + 1])
    }

    #[inline]
    pub fn w_at_cell(&self, c: usize) -> [f64; 2] {
        [
            0.5 * (self.w[c][0] + self.w[c + 1][0]),
            0.5 * (self.w[c][1] + self.w[c + 1][1]),
        ]
    }

    /// Largest pointwise deviation of any field from the far-field state.
    pub fn max_deviation_from_reference(&self) -> f64 {
        let cells = self.v.iter().zip(&self.theta).zip(&self.b).map(|((v, th), b)| {
            (v - 1.0)
                .abs()
                .max((th - 1.0).abs())
                .max(b[0].abs())
                .max(b[1].abs())
        });
        let nodes = self
            .u
            .iter()
            .zip(&self.w)
            .map(|(u, w)| u.abs().max(w[0].abs()).max(w[1].abs()));
        cells.chain(nodes).fold(0.0, f64::max)
    }
}
