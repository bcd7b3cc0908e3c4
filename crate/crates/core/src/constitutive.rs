//! Pointwise constitutive laws of the perfect-gas MHD model.

use crate::{Error, GasState, PhysicalParams, Result};

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be > 0 (got {x})")))
    }
}

/// `P = R θ / v`.
pub fn pressure(v: f64, theta: f64, p: &PhysicalParams) -> Result<f64> {
    require_positive("specific volume", v)?;
    require_positive("temperature", theta)?;
    Ok(p.pressure_of(v, theta))
}

/// `μ(v) = μ̃₁ + μ̃₂ v^(-α)`.
pub fn viscosity_mu(v: f64, p: &PhysicalParams) -> Result<f64> {
    require_positive("specific volume", v)?;
    Ok(p.mu(v))
}

/// `κ(θ) = κ̃ θ^β`; degenerates as `θ → 0` when `β > 0`.
pub fn conductivity_kappa(theta: f64, p: &PhysicalParams) -> Result<f64> {
    require_positive("temperature", theta)?;
    Ok(p.kappa_of(theta))
}

/// Cell-centred sample of every field; node quantities already averaged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSample {
    pub v: f64,
    pub theta: f64,
    pub u: f64,
    pub w: [f64; 2],
    pub b: [f64; 2],
}

impl CellSample {
    pub fn reference() -> Self {
        Self {
            v: 1.0,
            theta: 1.0,
            u: 0.0,
            w: [0.0; 2],
            b: [0.0; 2],
        }
    }

    /// Sample cell `c` of `state`, averaging `u` and `w` from the two
    /// adjacent nodes.
    pub fn of(state: &GasState, c: usize) -> Self {
        Self {
            v: state.v[c],
            theta: state.theta[c],
            u: state.u_at_cell(c),
            w: state.w_at_cell(c),
            b: state.b[c],
        }
    }
}

#[inline]
pub(crate) fn norm2(x: [f64; 2]) -> f64 {
    x[0] * x[0] + x[1] * x[1]
}

/// Total energy per unit mass `c_v θ + (u² + |w|² + v|b|²) / 2`.
pub fn total_energy_density(cell: &CellSample, p: &PhysicalParams) -> Result<f64> {
    require_positive("specific volume", cell.v)?;
    require_positive("temperature", cell.theta)?;
    Ok(p.cv * cell.theta + 0.5 * (cell.u * cell.u + norm2(cell.w) + cell.v * norm2(cell.b)))
}

/// Effective stress `σ = μ(v) u_x / v − (P + |b|²/2)` at every node.
///
/// Interior nodes use the arithmetic mean of the two adjacent cells'
/// `μ/v`, `P` and `|b|²` and the centred velocity difference; the two end
/// nodes use their single adjacent cell and a one-sided difference.
pub fn effective_stress(state: &GasState, p: &PhysicalParams) -> Result<Vec<f64>> {
    let m = state.grid.cells;
    let dx = state.grid.dx;
    let mut cell_visc = Vec::with_capacity(m);
    let mut cell_press = Vec::with_capacity(m);
    for c in 0..m {
        let v = state.v[c];
        cell_visc.push(viscosity_mu(v, p)? / v);
        cell_press.push(pressure(v, state.theta[c], p)? + 0.5 * norm2(state.b[c]));
    }
    let mut sigma = Vec::with_capacity(m + 1);
    sigma.push(cell_visc[0] * (state.u[1] - state.u[0]) / dx - cell_press[0]);
    for j in 1..m {
        let visc = 0.5 * (cell_visc[j - 1] + cell_visc[j]);
        let press = 0.5 * (cell_press[j - 1] + cell_press[j]);
        let ux = (state.u[j + 1] - state.u[j - 1]) / (2.0 * dx);
        sigma.push(visc * ux - press);
    }
    sigma.push(cell_visc[m - 1] * (state.u[m] - state.u[m - 1]) / dx - cell_press[m - 1]);
    Ok(sigma)
}
