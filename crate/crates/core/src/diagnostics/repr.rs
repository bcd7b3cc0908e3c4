//! Representation formula for the specific volume under the normalized
//! preset:
//!
//! `v = B_N Y_N exp(v^{-α}) (1 + ∫₀ᵗ exp(−v^{-α}) (θ + v|b|²/2) / (B_N Y_N) dτ)`
//!
//! with `Y_N = exp ∫₀ᵗ σ(N, τ) dτ` and
//! `B_N = v₀ exp(−v₀^{-α}) exp(∫_N^x u dy − ∫_N^x u₀ dy)`.
//! The identity holds exactly for the continuous problem, so the residual
//! measures how consistently the discrete trajectory integrates it.

use crate::constitutive::{effective_stress, norm2};
use crate::{Error, GasState, PhysicalParams, Result};

/// Running integrals for one anchor node.
#[derive(Debug, Clone, PartialEq)]
pub struct ReprAccumulator {
    anchor: usize,
    /// `v₀ exp(−v₀^{-α})` per cell.
    base: Vec<f64>,
    /// `∫_N^{x_c} u₀ dy` per cell.
    u0_integral: Vec<f64>,
    /// `∫₀ᵗ σ(N, τ) dτ`, i.e. `ln Y_N`.
    log_y: f64,
    /// Inner integral of the formula per cell.
    inner: Vec<f64>,
}

fn require_normalized(p: &PhysicalParams) -> Result<()> {
    if p.is_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// `∫_N^{x_c} u dy` at every cell centre, integrating the piecewise-linear
/// node interpolant of `u` from node `anchor`.
fn velocity_integral(state: &GasState, anchor: usize) -> Vec<f64> {
    let dx = state.grid.dx;
    let u = &state.u;
    let mut node = vec![0.0; u.len()];
    for j in anchor + 1..u.len() {
        node[j] = node[j - 1] + 0.5 * dx * (u[j - 1] + u[j]);
    }
    for j in (0..anchor).rev() {
        node[j] = node[j + 1] - 0.5 * dx * (u[j] + u[j + 1]);
    }
    (0..state.grid.cells)
        .map(|c| node[c] + 0.125 * dx * (3.0 * u[c] + u[c + 1]))
        .collect()
}

impl ReprAccumulator {
    /// Accumulator at the state's time (taken as `τ = 0`). `anchor` is a
    /// mass coordinate; the nearest node is used. The default is the
    /// integer coordinate nearest the domain centre.
    pub fn new(state: &GasState, p: &PhysicalParams, anchor: Option<f64>) -> Result<Self> {
        require_normalized(p)?;
        if !state.is_positive() {
            return Err(Error::Domain("representation needs a positive state".into()));
        }
        let g = state.grid;
        let x = match anchor {
            Some(x) if x.is_finite() && x >= g.left_edge && x <= g.right_edge() => x,
            Some(x) => {
                return Err(Error::InvalidParams(format!(
                    "anchor {x} lies outside [{}, {}]",
                    g.left_edge,
                    g.right_edge()
                )))
            }
            None => (0.5 * (g.left_edge + g.right_edge())).round(),
        };
        let anchor = g.nearest_node(x);
        Ok(Self {
            anchor,
            base: state
                .v
                .iter()
                .map(|&v| v * (-v.powf(-p.alpha)).exp())
                .collect(),
            u0_integral: velocity_integral(state, anchor),
            log_y: 0.0,
            inner: vec![0.0; g.cells],
        })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// `Y_N` at the last update.
    pub fn y(&self) -> f64 {
        self.log_y.exp()
    }

    pub fn inner(&self) -> &[f64] {
        &self.inner
    }

    /// `B_N(x_c, t)` for the current state.
    pub fn b_factor(&self, state: &GasState) -> Vec<f64> {
        velocity_integral(state, self.anchor)
            .iter()
            .zip(&self.u0_integral)
            .zip(&self.base)
            .map(|((now, then), base)| base * (now - then).exp())
            .collect()
    }

    fn check(&self, state: &GasState, p: &PhysicalParams) -> Result<()> {
        require_normalized(p)?;
        if state.v.len() != self.base.len() {
            return Err(Error::Shape(format!(
                "accumulator has {} cells, state has {}",
                self.base.len(),
                state.v.len()
            )));
        }
        if !state.is_positive() {
            return Err(Error::Domain("representation needs a positive state".into()));
        }
        Ok(())
    }

    /// Fold in the step of length `dt` that ended at `state`. The stress
    /// at the anchor is frozen over the step, so `1/Y_N` is integrated
    /// exactly; the integrand's other factors use the end-of-step state.
    pub fn update(&mut self, state: &GasState, dt: f64, p: &PhysicalParams) -> Result<()> {
        self.check(state, p)?;
        let sigma = effective_stress(state, p)?[self.anchor];
        let weight = if (sigma * dt).abs() < 1e-300 {
            dt
        } else {
            -(-sigma * dt).exp_m1() / sigma
        };
        let y_old = self.log_y.exp();
        let bf = self.b_factor(state);
        for (c, inner) in self.inner.iter_mut().enumerate() {
            let v = state.v[c];
            let f = (-v.powf(-p.alpha)).exp() * (state.theta[c] + 0.5 * v * norm2(state.b[c]));
            *inner += f / (bf[c] * y_old) * weight;
        }
        self.log_y += sigma * dt;
        Ok(())
    }

    /// Relative residual `|v − RHS| / v` per cell.
    pub fn residual(&self, state: &GasState, p: &PhysicalParams) -> Result<Vec<f64>> {
        self.check(state, p)?;
        let y = self.log_y.exp();
        Ok(self
            .b_factor(state)
            .iter()
            .zip(&self.inner)
            .zip(&state.v)
            .map(|((bf, inner), &v)| {
                let rhs = bf * y * v.powf(-p.alpha).exp() * (1.0 + inner);
                (v - rhs).abs() / v
            })
            .collect())
    }
}

/// Functional form of [`ReprAccumulator::update`].
pub fn representation_update(
    mut acc: ReprAccumulator,
    state: &GasState,
    dt: f64,
    p: &PhysicalParams,
) -> Result<ReprAccumulator> {
    acc.update(state, dt, p)?;
    Ok(acc)
}

/// Functional form of [`ReprAccumulator::residual`].
pub fn representation_residual(acc: &ReprAccumulator, state: &GasState, p: &PhysicalParams) -> Result<Vec<f64>> {
    acc.residual(state, p)
}
