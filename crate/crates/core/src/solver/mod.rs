//! Positivity-guarded semi-implicit time stepping.
//!
//! One step runs five stages in order, each using the freshest fields:
//! velocity (implicit viscosity, explicit pressure), volume (conservative),
//! transverse velocity (implicit), induction (implicit) and temperature
//! (Newton). A step that produces a nonpositive volume or temperature, or
//! whose temperature solve does not converge, is discarded and retried
//! with half the time step.

pub mod stages;

use crate::boundary::{BoundaryValues, ThetaEnd};
use crate::util::min_max;
use crate::{BoundaryCondition, Error, GasState, Grid, PhysicalParams, Result};

use stages::{
    substep_induction, substep_temperature, substep_transverse_w, substep_velocity,
    substep_volume, TemperatureFailure, TemperatureProblem,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub cfl: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Max-norm tolerance on the temperature residual (temperature units).
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub retry_max: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            dt_min: 1e-10,
            dt_max: 0.1,
            newton_tol: 1e-10,
            newton_max_iter: 50,
            retry_max: 20,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidControl(format!("cfl must lie in (0, 1] (got {})", self.cfl)));
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt_max) || !self.dt_max.is_finite() {
            return Err(Error::InvalidControl(format!(
                "need 0 < dt_min < dt_max < inf (got {} and {})",
                self.dt_min, self.dt_max
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidControl(format!(
                "newton_tol must be > 0 (got {})",
                self.newton_tol
            )));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidControl("newton_max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// What one accepted step did. Fluxes are the amounts that entered
/// through the ends during the step (right minus left, times `dt`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub dt_used: f64,
    pub newton_iterations: usize,
    pub picard_fallback: bool,
    pub retries: usize,
    /// `dt (u_M − u_0)`: change of `Σ v dx`.
    pub mass_flux: f64,
    /// `dt (σ_last − σ_first)` with the cell stresses of the velocity stage:
    /// change of `Σ u dx`.
    pub momentum_flux: f64,
    /// Heat and magnetic energy flux through the ends.
    pub energy_flux: f64,
    /// End-face flux of the energy–entropy density (zero whenever the end
    /// temperature is 1 or the end is insulated, and `b = 0` at the ends).
    pub entropy_flux: f64,
}

/// Source fields appended to the right-hand sides (manufactured solutions).
#[derive(Debug, Clone, PartialEq)]
pub struct Sources {
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub theta: Vec<f64>,
}

/// Boundary data and optional forcing as functions of time.
pub trait Drive {
    fn boundary(&self, t: f64) -> BoundaryValues;

    fn sources(&self, _grid: &Grid, _t: f64) -> Option<Sources> {
        None
    }
}

impl Drive for BoundaryCondition {
    fn boundary(&self, _t: f64) -> BoundaryValues {
        self.values()
    }
}

/// Fast magnetosonic speed in the mass coordinate, `sqrt(γ P v + v |b|²) / v`,
/// bounded below by the Alfvén speed `1 / sqrt(v)` of the unit longitudinal field.
pub fn signal_speed(v: f64, theta: f64, b: [f64; 2], p: &PhysicalParams) -> f64 {
    let fast = (p.gamma() * p.pressure_of(v, theta) * v + v * (b[0] * b[0] + b[1] * b[1])).sqrt() / v;
    fast.max(1.0 / v.sqrt())
}

/// CFL step `cfl * dx / max_speed`, clamped to `[dt_min, dt_max]`. The far
/// field's sound speed always enters the maximum.
pub fn compute_dt(state: &GasState, p: &PhysicalParams, ctl: &StepControl) -> f64 {
    let far = signal_speed(1.0, 1.0, [0.0; 2], p);
    let speed = (0..state.grid.cells)
        .map(|c| signal_speed(state.v[c], state.theta[c], state.b[c], p))
        .fold(far, |a, s| if s.is_nan() { a } else { a.max(s) });
    let dt = ctl.cfl * state.grid.dx / speed;
    if dt.is_nan() {
        return ctl.dt_min;
    }
    dt.clamp(ctl.dt_min, ctl.dt_max)
}

/// Advance one accepted step under one of the three boundary regimes.
pub fn step(
    state: &GasState,
    p: &PhysicalParams,
    bc: BoundaryCondition,
    ctl: &StepControl,
) -> Result<(GasState, StepReport)> {
    let dt = compute_dt(state, p, ctl);
    advance(state, p, &bc, ctl, dt)
}

enum Trial {
    Positivity { min_v: f64, min_theta: f64 },
    Newton { residual: f64, min_v: f64, min_theta: f64 },
}

/// Advance one accepted step, trying `dt` first and halving on failure.
pub fn advance<D: Drive + ?Sized>(
    state: &GasState,
    p: &PhysicalParams,
    drive: &D,
    ctl: &StepControl,
    dt: f64,
) -> Result<(GasState, StepReport)> {
    ctl.validate()?;
    state.check_shape()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidControl(format!("dt must be positive and finite (got {dt})")));
    }
    let mut dt = dt;
    let mut retries = 0;
    let mut newton_failures = 0;
    loop {
        let t_new = state.t + dt;
        let bnd = drive.boundary(t_new);
        let src = drive.sources(&state.grid, t_new);
        let failure = match try_step(state, p, &bnd, src.as_ref(), dt, ctl) {
            Ok((next, mut report)) => {
                report.retries = retries;
                return Ok((next, report));
            }
            Err(f) => f,
        };
        if let Trial::Newton { .. } = failure {
            newton_failures += 1;
        } else {
            newton_failures = 0;
        }
        let give_up = newton_failures >= 2 || retries >= ctl.retry_max || 0.5 * dt < ctl.dt_min;
        if give_up {
            return Err(match failure {
                Trial::Newton {
                    residual,
                    min_v,
                    min_theta,
                } => Error::NewtonDivergence {
                    t: state.t,
                    dt,
                    residual,
                    min_v,
                    min_theta,
                },
                Trial::Positivity { min_v, min_theta } => Error::PositivityFailure {
                    t: state.t,
                    dt,
                    min_v,
                    min_theta,
                },
            });
        }
        retries += 1;
        dt *= 0.5;
    }
}

fn try_step(
    state: &GasState,
    p: &PhysicalParams,
    bnd: &BoundaryValues,
    src: Option<&Sources>,
    dt: f64,
    ctl: &StepControl,
) -> std::result::Result<(GasState, StepReport), Trial> {
    let g = state.grid;
    let dx = g.dx;
    let m = g.cells;
    let (v_min0, _) = min_max(&state.v);
    let (th_min0, _) = min_max(&state.theta);
    let positivity = |min_v: f64, min_theta: f64| Trial::Positivity { min_v, min_theta };

    // (a) velocity
    let vel = substep_velocity(
        &state.u,
        &state.v,
        &state.theta,
        &state.b,
        p,
        bnd,
        src.map(|s| s.u.as_slice()),
        dx,
        dt,
    )
    .map_err(|_| positivity(v_min0, th_min0))?;

    // (b) volume
    let v_new = substep_volume(&state.v, &vel.u, src.map(|s| s.v.as_slice()), dx, dt);
    let (v_min, _) = min_max(&v_new);
    if !(v_min > 0.0) {
        return Err(positivity(v_min, th_min0));
    }

    // (c) transverse velocity
    let tw = substep_transverse_w(&state.w, &v_new, &state.b, p, bnd, src.map(|s| s.w.as_slice()), dx, dt)
        .map_err(|_| positivity(v_min, th_min0))?;

    // (d) induction
    let ind = substep_induction(
        &state.b,
        &state.v,
        &v_new,
        &tw.w,
        p,
        bnd,
        src.map(|s| s.b.as_slice()),
        dx,
        dt,
    )
    .map_err(|_| positivity(v_min, th_min0))?;

    // (e) temperature
    let div_u: Vec<f64> = (0..m).map(|c| (vel.u[c + 1] - vel.u[c]) / dx).collect();
    let heating: Vec<f64> = (0..m)
        .map(|c| {
            vel.viscous_heating[c]
                + tw.viscous_heating[c]
                + 0.5 * (ind.face_heating[c] + ind.face_heating[c + 1])
        })
        .collect();
    let prob = TemperatureProblem {
        theta_old: &state.theta,
        v: &v_new,
        div_u: &div_u,
        heating: &heating,
        source: src.map(|s| s.theta.as_slice()),
        dx,
        dt,
    };
    let temp = substep_temperature(&prob, p, bnd, ctl.newton_tol, ctl.newton_max_iter).map_err(|f| match f {
        TemperatureFailure::NotConverged { residual } => Trial::Newton {
            residual,
            min_v: v_min,
            min_theta: th_min0,
        },
        TemperatureFailure::Linear(_) | TemperatureFailure::NonPositive => positivity(v_min, th_min0),
    })?;
    let (th_min, _) = min_max(&temp.theta);
    if !(th_min > 0.0) {
        return Err(positivity(v_min, th_min));
    }

    // (f) end fluxes
    let q_left = temp.heat_flux[0];
    let q_right = temp.heat_flux[m];
    // ν b·b_x / v at the end faces, with the half-cell end difference
    let end_b_flux = |cell: usize, end_b: [f64; 2], outward: f64| -> f64 {
        let k = p.nu / v_new[cell];
        (0..2)
            .map(|i| end_b[i] * k * 2.0 * outward * (end_b[i] - ind.b[cell][i]) / dx)
            .sum()
    };
    let mag_left = end_b_flux(0, bnd.left.b, -1.0);
    let mag_right = end_b_flux(m - 1, bnd.right.b, 1.0);
    let entropy_face = |q: f64, end: ThetaEnd, mag: f64| match end {
        ThetaEnd::Dirichlet(th) => q * (1.0 - 1.0 / th) + mag,
        ThetaEnd::Insulated => mag,
    };
    let report = StepReport {
        dt_used: dt,
        newton_iterations: temp.iterations,
        picard_fallback: temp.picard,
        retries: 0,
        mass_flux: dt * (vel.u[m] - vel.u[0]),
        momentum_flux: dt * (vel.stress[m - 1] - vel.stress[0]),
        energy_flux: dt * ((q_right + mag_right) - (q_left + mag_left)),
        entropy_flux: dt
            * (entropy_face(q_right, bnd.right.theta, mag_right)
                - entropy_face(q_left, bnd.left.theta, mag_left)),
    };
    let next = GasState {
        grid: g,
        v: v_new,
        theta: temp.theta,
        b: ind.b,
        u: vel.u,
        w: tw.w,
        t: state.t + dt,
        step: state.step + 1,
    };
    Ok((next, report))
}

/// Step until `t_end`, shortening the final step to land on it exactly.
/// `sink` sees every accepted state with its report.
pub fn run_until<F>(
    state: GasState,
    t_end: f64,
    p: &PhysicalParams,
    bc: BoundaryCondition,
    ctl: &StepControl,
    sink: F,
) -> Result<GasState>
where
    F: FnMut(&GasState, &StepReport),
{
    run_until_driven(state, t_end, p, &bc, ctl, sink)
}

pub fn run_until_driven<D, F>(
    mut state: GasState,
    t_end: f64,
    p: &PhysicalParams,
    drive: &D,
    ctl: &StepControl,
    mut sink: F,
) -> Result<GasState>
where
    D: Drive + ?Sized,
    F: FnMut(&GasState, &StepReport),
{
    if t_end < state.t {
        return Err(Error::InvalidControl(format!(
            "t_end = {t_end} precedes the current time {}",
            state.t
        )));
    }
    while state.t < t_end {
        let mut dt = compute_dt(&state, p, ctl);
        let remaining = t_end - state.t;
        if dt >= remaining - ctl.dt_min {
            dt = remaining;
        }
        let (mut next, report) = advance(&state, p, drive, ctl, dt)?;
        if report.dt_used == remaining {
            next.t = t_end;
        }
        sink(&next, &report);
        state = next;
    }
    Ok(state)
}

/// Fixed-step integration (`n` steps of `dt`, no CFL control); used by
/// the convergence studies.
pub fn run_fixed<D, F>(
    mut state: GasState,
    steps: usize,
    dt: f64,
    p: &PhysicalParams,
    drive: &D,
    ctl: &StepControl,
    mut sink: F,
) -> Result<GasState>
where
    D: Drive + ?Sized,
    F: FnMut(&GasState, &StepReport),
{
    for _ in 0..steps {
        let (next, report) = advance(&state, p, drive, ctl, dt)?;
        if report.retries > 0 {
            return Err(Error::Study(format!(
                "fixed-step run needed {} retries at t = {}",
                report.retries, state.t
            )));
        }
        sink(&next, &report);
        state = next;
    }
    Ok(state)
}

#[cfg(test)]
mod tests;
