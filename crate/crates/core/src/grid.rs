use crate::{Error, Result};

/// Uniform staggered mesh in the Lagrangian mass coordinate.
///
/// Cell `c` (0-based, `0..cells`) spans nodes `c` and `c + 1`; nodes run
/// `0..=cells`. Specific volume, temperature and the magnetic field live
/// at cell centres, both velocities at nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub cells: usize,
    pub dx: f64,
    pub left_edge: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 4;

    pub fn new(cells: usize, length: f64, left_edge: f64) -> Result<Self> {
        if cells < Self::MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} cells (got {cells})",
                Self::MIN_CELLS
            )));
        }
        if !(length > 0.0) || !length.is_finite() || !left_edge.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "domain length must be finite and > 0 (got {length})"
            )));
        }
        Ok(Self {
            cells,
            dx: length / cells as f64,
            left_edge,
        })
    }

    #[inline]
    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn length(&self) -> f64 {
        self.dx * self.cells as f64
    }

    pub fn right_edge(&self) -> f64 {
        self.node(self.cells)
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        self.left_edge + j as f64 * self.dx
    }

    #[inline]
    pub fn center(&self, c: usize) -> f64 {
        self.left_edge + (c as f64 + 0.5) * self.dx
    }

    pub fn node_coords(&self) -> Vec<f64> {
        (0..self.nodes()).map(|j| self.node(j)).collect()
    }

    pub fn center_coords(&self) -> Vec<f64> {
        (0..self.cells).map(|c| self.center(c)).collect()
    }

    /// Index of the node closest to mass coordinate `x`, clamped to the mesh.
    pub fn nearest_node(&self, x: f64) -> usize {
        let j = ((x - self.left_edge) / self.dx).round();
        j.clamp(0.0, self.cells as f64) as usize
    }
}
