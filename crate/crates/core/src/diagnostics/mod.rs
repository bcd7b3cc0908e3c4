//! Computable functionals of the energy–entropy analysis, evaluated on a
//! state or accumulated along a trajectory.
//!
//! Quadratures follow the solver's stencils: midpoint rule on cells for
//! cell quantities, and face differences (with half-weight end faces) for
//! temperature and magnetic gradients, so the discrete dissipation rate is
//! the one the temperature stage actually sees.

mod repr;
mod roots;

pub use repr::{representation_residual, representation_update, ReprAccumulator};
pub use roots::equilibrium_roots;

use crate::boundary::BoundaryValues;
use crate::constitutive::{norm2, total_energy_density, CellSample};
use crate::solver::StepReport;
use crate::stencil::{
    face_differences, face_gradient_factor, face_weight, heat_conductance, magnetic_conductance,
    magnetic_face_dissipation, theta_end_value,
};
use crate::util::{min_max, sum};
use crate::{Error, GasState, PhysicalParams, Result};

/// `(2 ln 2 − 1) / 2`: the smallest value of `θ − ln θ − 1` outside `[1/2, 2]`.
pub const LEVEL_SET_RATE: f64 = std::f64::consts::LN_2 - 0.5;

fn check_positive(state: &GasState) -> Result<()> {
    if state.is_positive() {
        Ok(())
    } else {
        let (v, _) = state.v_range();
        let (th, _) = state.theta_range();
        Err(Error::Domain(format!(
            "state has min v = {v}, min theta = {th}; both must be > 0"
        )))
    }
}

/// `∫ [(u² + |w|² + v|b|²)/2 + R(v − ln v − 1) + c_v(θ − ln θ − 1)] dx`.
pub fn energy_entropy(state: &GasState, p: &PhysicalParams) -> Result<f64> {
    check_positive(state)?;
    let dx = state.grid.dx;
    Ok(sum((0..state.grid.cells).map(|c| {
        let s = CellSample::of(state, c);
        let kinetic = 0.5 * (s.u * s.u + norm2(s.w) + s.v * norm2(s.b));
        (kinetic + p.r * (s.v - s.v.ln() - 1.0) + p.cv * (s.theta - s.theta.ln() - 1.0)) * dx
    })))
}

/// Dissipation rate
/// `∫ [κ̃ θ^β θ_x² / (v θ²) + (μ(v) u_x² + λ |w_x|² + ν |b_x|²) / (v θ)] dx`.
pub fn dissipation_w(state: &GasState, p: &PhysicalParams, bnd: &BoundaryValues) -> Result<f64> {
    check_positive(state)?;
    let m = state.grid.cells;
    let dx = state.grid.dx;

    let cells = (0..m).map(|c| {
        let v = state.v[c];
        let d = (state.u[c + 1] - state.u[c]) / dx;
        let wx = [
            (state.w[c + 1][0] - state.w[c][0]) / dx,
            (state.w[c + 1][1] - state.w[c][1]) / dx,
        ];
        (p.mu(v) * d * d + p.lambda * norm2(wx)) / (v * state.theta[c]) * dx
    });

    let theta = &state.theta;
    let left = theta_end_value(bnd.left.theta, theta[0]);
    let right = theta_end_value(bnd.right.theta, theta[m - 1]);
    let kk = heat_conductance(theta, &state.v, p, bnd.left.theta, bnd.right.theta);
    let diff = face_differences(theta, left, right, dx);
    let kb = magnetic_conductance(&state.v, p);
    let mag = magnetic_face_dissipation(&state.b, &kb, &bnd.left, &bnd.right, dx);
    let faces = (0..=m).map(|f| {
        let th_face = if f == 0 {
            left
        } else if f == m {
            right
        } else {
            0.5 * (theta[f - 1] + theta[f])
        };
        let grad = face_gradient_factor(f, m) * diff[f];
        let heat = kk[f] * diff[f] * grad / (th_face * th_face);
        (heat + mag[f] / th_face) * face_weight(f, m, dx)
    });
    Ok(sum(cells.chain(faces)))
}

/// Unit-mass-interval integrals `∫_N^{N+1} v dx` and `∫_N^{N+1} θ dx` over
/// every whole integer interval inside the mesh.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlabIntegrals {
    pub starts: Vec<f64>,
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
}

impl SlabIntegrals {
    pub fn v_range(&self) -> Option<(f64, f64)> {
        (!self.v.is_empty()).then(|| min_max(&self.v))
    }

    pub fn theta_range(&self) -> Option<(f64, f64)> {
        (!self.theta.is_empty()).then(|| min_max(&self.theta))
    }
}

pub fn slab_integrals(state: &GasState) -> SlabIntegrals {
    let g = state.grid;
    let eps = 1e-9 * g.dx;
    let first = (g.left_edge - eps).ceil();
    let last = (g.right_edge() + eps).floor() - 1.0;
    let mut out = SlabIntegrals::default();
    let mut n = first;
    while n <= last {
        let (a, b) = (n, n + 1.0);
        let lo = (((a - g.left_edge) / g.dx).floor().max(0.0)) as usize;
        let hi = (((b - g.left_edge) / g.dx).ceil() as usize).min(g.cells);
        let mut iv = 0.0;
        let mut it = 0.0;
        for c in lo..hi {
            let overlap = (g.node(c + 1).min(b) - g.node(c).max(a)).max(0.0);
            iv += overlap * state.v[c];
            it += overlap * state.theta[c];
        }
        out.starts.push(n);
        out.v.push(iv);
        out.theta.push(it);
        n += 1.0;
    }
    out
}

/// Measures `(|{θ < lo}|, |{θ > hi}|)` counted cell by cell.
pub fn level_set_measures(state: &GasState, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidParams(format!(
            "level-set thresholds need 0 < lo < hi (got {lo}, {hi})"
        )));
    }
    let dx = state.grid.dx;
    let below = state.theta.iter().filter(|&&t| t < lo).count() as f64 * dx;
    let above = state.theta.iter().filter(|&&t| t > hi).count() as f64 * dx;
    Ok((below, above))
}

/// Upper bound `e0 / (ln 2 − 1/2)` on `|{θ < 1/2}| + |{θ > 2}|`.
pub fn level_set_bound(e0: f64) -> f64 {
    e0 / LEVEL_SET_RATE
}

/// Running sums of the end fluxes reported by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxTotals {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub entropy: f64,
}

impl FluxTotals {
    pub fn add(&mut self, r: &StepReport) {
        self.mass += r.mass_flux;
        self.momentum += r.momentum_flux;
        self.energy += r.energy_flux;
        self.entropy += r.entropy_flux;
    }
}

/// One time-stamped row of every monitored quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: u64,
    pub dt: f64,
    pub e_entropy: f64,
    pub w: f64,
    pub cumulative_w: f64,
    pub min_v: f64,
    pub max_v: f64,
    pub min_theta: f64,
    pub max_theta: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub mass_flux_total: f64,
    pub momentum_flux_total: f64,
    pub energy_flux_total: f64,
    pub entropy_flux_total: f64,
    pub measure_theta_low: f64,
    pub measure_theta_high: f64,
    pub slab_min: f64,
    pub slab_max: f64,
    pub slab_theta_min: f64,
    pub slab_theta_max: f64,
    /// Only available under the normalized preset.
    pub repr_residual_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            theta_lo: 0.5,
            theta_hi: 2.0,
        }
    }
}

/// Inputs of [`make_record`] that come from the trajectory rather than
/// the current state.
#[derive(Debug, Clone, Copy)]
pub struct RecordContext<'a> {
    pub dt: f64,
    pub w: f64,
    pub cumulative_w: f64,
    pub fluxes: &'a FluxTotals,
    pub repr: Option<&'a ReprAccumulator>,
    pub thresholds: Thresholds,
}

/// Assemble a record from a state and its trajectory context. `ctx.w` is
/// the state's dissipation rate (see [`dissipation_w`]).
pub fn make_record(state: &GasState, p: &PhysicalParams, ctx: &RecordContext) -> Result<DiagnosticsRecord> {
    let dx = state.grid.dx;
    let e_entropy = energy_entropy(state, p)?;
    let (min_v, max_v) = state.v_range();
    let (min_theta, max_theta) = state.theta_range();
    let energy = sum((0..state.grid.cells).map(|c| {
        total_energy_density(&CellSample::of(state, c), p).unwrap_or(f64::NAN) * dx
    }));
    let (low, high) = level_set_measures(state, ctx.thresholds.theta_lo, ctx.thresholds.theta_hi)?;
    let slabs = slab_integrals(state);
    let (slab_min, slab_max) = slabs.v_range().unwrap_or((f64::NAN, f64::NAN));
    let (slab_theta_min, slab_theta_max) = slabs.theta_range().unwrap_or((f64::NAN, f64::NAN));
    let repr_residual_max = match ctx.repr {
        Some(acc) => Some(
            acc.residual(state, p)?
                .into_iter()
                .fold(0.0_f64, f64::max),
        ),
        None => None,
    };
    Ok(DiagnosticsRecord {
        t: state.t,
        step: state.step,
        dt: ctx.dt,
        e_entropy,
        w: ctx.w,
        cumulative_w: ctx.cumulative_w,
        min_v,
        max_v,
        min_theta,
        max_theta,
        mass: sum(state.v.iter().map(|v| v * dx)),
        momentum: sum(state.u.iter().map(|u| u * dx)),
        energy,
        mass_flux_total: ctx.fluxes.mass,
        momentum_flux_total: ctx.fluxes.momentum,
        energy_flux_total: ctx.fluxes.energy,
        entropy_flux_total: ctx.fluxes.entropy,
        measure_theta_low: low,
        measure_theta_high: high,
        slab_min,
        slab_max,
        slab_theta_min,
        slab_theta_max,
        repr_residual_max,
    })
}

/// Stateful observer that turns accepted steps into records: it carries
/// the cumulative dissipation, flux totals and (normalized preset only)
/// the representation-formula accumulator.
#[derive(Debug, Clone)]
pub struct Monitor {
    params: PhysicalParams,
    bnd: BoundaryValues,
    thresholds: Thresholds,
    cumulative_w: f64,
    fluxes: FluxTotals,
    repr: Option<ReprAccumulator>,
    e0: f64,
}

impl Monitor {
    /// Start monitoring at `state` (normally `t = 0`). The representation
    /// accumulator is created when the preset allows it; `anchor` picks
    /// its integer mass coordinate (default: nearest the domain centre).
    pub fn new(
        state: &GasState,
        p: &PhysicalParams,
        bnd: BoundaryValues,
        thresholds: Thresholds,
        anchor: Option<f64>,
    ) -> Result<Self> {
        let repr = if p.is_normalized() {
            Some(ReprAccumulator::new(state, p, anchor)?)
        } else {
            None
        };
        Ok(Self {
            params: *p,
            bnd,
            thresholds,
            cumulative_w: 0.0,
            fluxes: FluxTotals::default(),
            repr,
            e0: energy_entropy(state, p)?,
        })
    }

    /// Energy–entropy functional of the initial state.
    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn fluxes(&self) -> &FluxTotals {
        &self.fluxes
    }

    pub fn repr(&self) -> Option<&ReprAccumulator> {
        self.repr.as_ref()
    }

    /// Record for the starting state, before any step.
    pub fn initial_record(&self, state: &GasState) -> Result<DiagnosticsRecord> {
        let w = dissipation_w(state, &self.params, &self.bnd)?;
        self.record(state, 0.0, w)
    }

    /// Fold in one accepted step and return its record.
    pub fn observe(&mut self, state: &GasState, report: &StepReport) -> Result<DiagnosticsRecord> {
        let w = self.advance(state, report)?;
        self.record(state, report.dt_used, w)
    }

    /// Fold in one accepted step without assembling a record; returns `W`.
    pub fn advance(&mut self, state: &GasState, report: &StepReport) -> Result<f64> {
        let w = dissipation_w(state, &self.params, &self.bnd)?;
        self.cumulative_w += w * report.dt_used;
        self.fluxes.add(report);
        if let Some(acc) = self.repr.as_mut() {
            acc.update(state, report.dt_used, &self.params)?;
        }
        Ok(w)
    }

    /// Record for `state` with the given last step and dissipation rate.
    pub fn record(&self, state: &GasState, dt: f64, w: f64) -> Result<DiagnosticsRecord> {
        make_record(
            state,
            &self.params,
            &RecordContext {
                dt,
                w,
                cumulative_w: self.cumulative_w,
                fluxes: &self.fluxes,
                repr: self.repr.as_ref(),
                thresholds: self.thresholds,
            },
        )
    }
}
