//! The five sub-stages of one semi-implicit step.
//!
//! Each stage takes the freshest available fields and returns its update;
//! the driver in the parent module chains them and handles retries.

use crate::boundary::BoundaryValues;
use crate::constitutive::norm2;
use crate::stencil::{
    face_conductance, face_differences, heat_conductance, is_dirichlet,
    magnetic_conductance, magnetic_face_dissipation, node_gradient, total_pressure,
    viscous_coeff,
};
use crate::tridiag::Tridiagonal;
use crate::{Error, PhysicalParams, Result};

/// Output of the implicit velocity stage.
#[derive(Debug, Clone)]
pub struct VelocityUpdate {
    pub u: Vec<f64>,
    /// Cell stress `μ(v) u_x / v − (P + |b|²/2)` built from the new velocity.
    pub stress: Vec<f64>,
    /// Viscous dissipation `μ(v) u_x² / v` per cell, as injected by the stage.
    pub viscous_heating: Vec<f64>,
}

/// Stage (a): `u_t = (μ(v) u_x / v)_x − (P + |b|²/2)_x`, diffusion implicit in
/// `u`, pressure explicit. `v`, `theta`, `b` are the stage-begin values.
#[allow(clippy::too_many_arguments)]
pub fn substep_velocity(
    u: &[f64],
    v: &[f64],
    theta: &[f64],
    b: &[[f64; 2]],
    p: &PhysicalParams,
    bnd: &BoundaryValues,
    source: Option<&[f64]>,
    dx: f64,
    dt: f64,
) -> Result<VelocityUpdate> {
    let m = v.len();
    let visc = viscous_coeff(v, p);
    let press = total_pressure(v, theta, b, p);
    let r = dt / (dx * dx);

    let mut sys = Tridiagonal::new(m - 1);
    let mut rhs = vec![0.0; m - 1];
    for j in 1..m {
        let i = j - 1;
        sys.lower[i] = -r * visc[j - 1];
        sys.upper[i] = -r * visc[j];
        sys.diag[i] = 1.0 + r * (visc[j - 1] + visc[j]);
        rhs[i] = u[j] - dt / dx * (press[j] - press[j - 1]);
        if let Some(s) = source {
            rhs[i] += dt * s[j];
        }
    }
    rhs[0] += r * visc[0] * bnd.left.u;
    rhs[m - 2] += r * visc[m - 1] * bnd.right.u;
    sys.solve_in_place(&mut rhs)?;

    let mut new_u = Vec::with_capacity(m + 1);
    new_u.push(bnd.left.u);
    new_u.extend_from_slice(&rhs);
    new_u.push(bnd.right.u);

    let grad = node_gradient(&new_u, dx);
    let stress = (0..m).map(|c| visc[c] * grad[c] - press[c]).collect();
    let viscous_heating = (0..m).map(|c| visc[c] * grad[c] * grad[c]).collect();
    Ok(VelocityUpdate {
        u: new_u,
        stress,
        viscous_heating,
    })
}

/// Stage (b): conservative volume update `v ← v + dt (u_{c+1} − u_c) / dx`.
pub fn substep_volume(v: &[f64], u: &[f64], source: Option<&[f64]>, dx: f64, dt: f64) -> Vec<f64> {
    v.iter()
        .enumerate()
        .map(|(c, &vc)| {
            let mut x = vc + dt * (u[c + 1] - u[c]) / dx;
            if let Some(s) = source {
                x += dt * s[c];
            }
            x
        })
        .collect()
}

/// Output of the transverse-velocity stage.
#[derive(Debug, Clone)]
pub struct TransverseUpdate {
    pub w: Vec<[f64; 2]>,
    /// `λ |w_x|² / v` per cell.
    pub viscous_heating: Vec<f64>,
}

/// Stage (c): `w_t = (λ w_x / v)_x + b_x` per component, implicit in `w`,
/// `b_x` explicit from the stage-begin field. `v` is the updated volume.
pub fn substep_transverse_w(
    w: &[[f64; 2]],
    v: &[f64],
    b: &[[f64; 2]],
    p: &PhysicalParams,
    bnd: &BoundaryValues,
    source: Option<&[[f64; 2]]>,
    dx: f64,
    dt: f64,
) -> Result<TransverseUpdate> {
    let m = v.len();
    let coeff: Vec<f64> = v.iter().map(|&vc| p.lambda / vc).collect();
    let r = dt / (dx * dx);
    let mut new_w = vec![[0.0; 2]; m + 1];
    let mut sys = Tridiagonal::new(m - 1);
    for k in 0..2 {
        let mut rhs = vec![0.0; m - 1];
        for j in 1..m {
            let i = j - 1;
            sys.lower[i] = -r * coeff[j - 1];
            sys.upper[i] = -r * coeff[j];
            sys.diag[i] = 1.0 + r * (coeff[j - 1] + coeff[j]);
            rhs[i] = w[j][k] + dt / dx * (b[j][k] - b[j - 1][k]);
            if let Some(s) = source {
                rhs[i] += dt * s[j][k];
            }
        }
        rhs[0] += r * coeff[0] * bnd.left.w[k];
        rhs[m - 2] += r * coeff[m - 1] * bnd.right.w[k];
        sys.solve_in_place(&mut rhs)?;
        new_w[0][k] = bnd.left.w[k];
        new_w[m][k] = bnd.right.w[k];
        for j in 1..m {
            new_w[j][k] = rhs[j - 1];
        }
    }
    let viscous_heating = (0..m)
        .map(|c| {
            let g = [(new_w[c + 1][0] - new_w[c][0]) / dx, (new_w[c + 1][1] - new_w[c][1]) / dx];
            coeff[c] * norm2(g)
        })
        .collect();
    Ok(TransverseUpdate {
        w: new_w,
        viscous_heating,
    })
}

/// Output of the induction stage.
#[derive(Debug, Clone)]
pub struct InductionUpdate {
    pub b: Vec<[f64; 2]>,
    /// `ν |b_x|² / v` at faces, `0..=M`.
    pub face_heating: Vec<f64>,
}

/// Stage (d): `(v b)_t = (ν b_x / v)_x + w_x` per component, implicit in
/// `b`. `v_old` multiplies the old field, `v_new` the unknown.
#[allow(clippy::too_many_arguments)]
pub fn substep_induction(
    b: &[[f64; 2]],
    v_old: &[f64],
    v_new: &[f64],
    w: &[[f64; 2]],
    p: &PhysicalParams,
    bnd: &BoundaryValues,
    source: Option<&[[f64; 2]]>,
    dx: f64,
    dt: f64,
) -> Result<InductionUpdate> {
    let m = v_new.len();
    let kk = magnetic_conductance(v_new, p);
    let r = dt / (dx * dx);
    let mut new_b = vec![[0.0; 2]; m];
    let mut sys = Tridiagonal::new(m);
    for k in 0..2 {
        let mut rhs = vec![0.0; m];
        for c in 0..m {
            sys.lower[c] = -r * kk[c];
            sys.upper[c] = -r * kk[c + 1];
            sys.diag[c] = v_new[c] + r * (kk[c] + kk[c + 1]);
            rhs[c] = v_old[c] * b[c][k] + dt / dx * (w[c + 1][k] - w[c][k]);
            if let Some(s) = source {
                rhs[c] += dt * s[c][k];
            }
        }
        rhs[0] += r * kk[0] * bnd.left.b[k];
        rhs[m - 1] += r * kk[m] * bnd.right.b[k];
        sys.solve_in_place(&mut rhs)?;
        for c in 0..m {
            new_b[c][k] = rhs[c];
        }
    }
    let face_heating = magnetic_face_dissipation(&new_b, &kk, &bnd.left, &bnd.right, dx);
    Ok(InductionUpdate {
        b: new_b,
        face_heating,
    })
}

/// Inputs of the temperature stage that stay fixed during the Newton solve.
#[derive(Debug, Clone)]
pub struct TemperatureProblem<'a> {
    pub theta_old: &'a [f64],
    pub v: &'a [f64],
    /// Cell velocity divergence `u_x`.
    pub div_u: &'a [f64],
    /// Cell dissipation `(μ u_x² + λ|w_x|² + ν|b_x|²) / v`.
    pub heating: &'a [f64],
    pub source: Option<&'a [f64]>,
    pub dx: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct TemperatureSolve {
    pub theta: Vec<f64>,
    pub iterations: usize,
    pub picard: bool,
    /// Final face heat fluxes `κ θ_x / v`, `0..=M`.
    pub heat_flux: Vec<f64>,
}

/// Failure modes of the temperature stage.
#[derive(Debug, Clone, PartialEq)]
pub enum TemperatureFailure {
    NotConverged { residual: f64 },
    /// The Newton update could not be damped enough to keep θ > 0.
    NonPositive,
    Linear(Error),
}

/// Scaled residual `G(θ)` of the implicit temperature equation
/// `c_v (θ − θ_old) + dt [R θ u_x / v − (κ θ_x / v)_x − heating − S] = 0`,
/// divided by `c_v` so it is measured in temperature units.
pub(crate) fn temperature_residual(
    theta: &[f64],
    prob: &TemperatureProblem,
    p: &PhysicalParams,
    bnd: &BoundaryValues,
) -> (Vec<f64>, Vec<f64>) {
    let m = theta.len();
    let kk = heat_conductance(theta, prob.v, p, bnd.left.theta, bnd.right.theta);
    let left = crate::stencil::theta_end_value(bnd.left.theta, theta[0]);
    let right = crate::stencil::theta_end_value(bnd.right.theta, theta[m - 1]);
    let diff = face_differences(theta, left, right, prob.dx);
    let flux: Vec<f64> = kk.iter().zip(&diff).map(|(k, d)| k * d).collect();
    let scale = prob.dt / p.cv;
    let res = (0..m)
        .map(|c| {
            let mut rate = p.r * theta[c] * prob.div_u[c] / prob.v[c]
                - (flux[c + 1] - flux[c]) / prob.dx
                - prob.heating[c];
            if let Some(s) = prob.source {
                rate -= s[c];
            }
            theta[c] - prob.theta_old[c] + scale * rate
        })
        .collect();
    (res, flux)
}

const MIN_DAMPING: f64 = 1.0 / 1024.0;

/// Stage (e): fully implicit temperature by damped Newton iteration with a
/// tridiagonal Jacobian; falls back to Picard (frozen conductivity) after
/// three iterations without residual decrease.
pub fn substep_temperature(
    prob: &TemperatureProblem,
    p: &PhysicalParams,
    bnd: &BoundaryValues,
    tol: f64,
    max_iter: usize,
) -> std::result::Result<TemperatureSolve, TemperatureFailure> {
    let m = prob.theta_old.len();
    let dx = prob.dx;
    let scale = prob.dt / p.cv;
    let left_dirichlet = is_dirichlet(bnd.left.theta);
    let right_dirichlet = is_dirichlet(bnd.right.theta);

    let mut theta = prob.theta_old.to_vec();
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    let mut picard = false;
    let mut last = f64::INFINITY;
    let mut sys = Tridiagonal::new(m);

    for it in 1..=max_iter {
        let (res, flux) = temperature_residual(&theta, prob, p, bnd);
        let norm = res.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
        if !norm.is_finite() {
            return Err(TemperatureFailure::NotConverged { residual: norm });
        }
        last = norm;
        if norm <= tol {
            return Ok(TemperatureSolve {
                theta,
                iterations: it,
                picard,
                heat_flux: flux,
            });
        }
        if norm < best {
            best = norm;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 3 {
                picard = true;
            }
            if stalled >= 12 {
                return Err(TemperatureFailure::NotConverged { residual: norm });
            }
        }

        // Jacobian of the scaled residual.
        let a: Vec<f64> = theta.iter().zip(prob.v).map(|(&t, &v)| p.kappa_of(t) / v).collect();
        let da: Vec<f64> = if picard || p.beta == 0.0 {
            vec![0.0; m]
        } else {
            a.iter().zip(&theta).map(|(&ac, &t)| ac * p.beta / t).collect()
        };
        let kk = face_conductance(&a, left_dirichlet, right_dirichlet);
        let left = crate::stencil::theta_end_value(bnd.left.theta, theta[0]);
        let right = crate::stencil::theta_end_value(bnd.right.theta, theta[m - 1]);
        let diff = face_differences(&theta, left, right, dx);
        // d(flux_f)/d(theta of the cell left / right of face f)
        let mut dflux_left = vec![0.0; m + 1];
        let mut dflux_right = vec![0.0; m + 1];
        for f in 0..=m {
            if f > 0 && f < m {
                let (al, ar) = (a[f - 1], a[f]);
                let s = (al + ar) * (al + ar);
                let dk_dl = 2.0 * ar * ar / s * da[f - 1];
                let dk_dr = 2.0 * al * al / s * da[f];
                dflux_left[f] = -kk[f] / dx + dk_dl * diff[f];
                dflux_right[f] = kk[f] / dx + dk_dr * diff[f];
            } else if f == 0 && left_dirichlet {
                dflux_right[0] = kk[0] / dx + 2.0 * da[0] * diff[0];
            } else if f == m && right_dirichlet {
                dflux_left[m] = -kk[m] / dx + 2.0 * da[m - 1] * diff[m];
            }
        }
        let mut rhs = vec![0.0; m];
        for c in 0..m {
            sys.lower[c] = scale / dx * dflux_left[c];
            sys.upper[c] = -scale / dx * dflux_right[c + 1];
            sys.diag[c] = 1.0
                + scale * p.r * prob.div_u[c] / prob.v[c]
                + scale / dx * (dflux_right[c] - dflux_left[c + 1]);
            rhs[c] = -res[c];
        }
        sys.solve_in_place(&mut rhs)
            .map_err(TemperatureFailure::Linear)?;

        // Damp the update so the iterate stays positive.
        let mut lambda = 1.0;
        while !theta.iter().zip(&rhs).all(|(t, d)| t + lambda * d > 0.0) {
            lambda *= 0.5;
            if lambda < MIN_DAMPING {
                return Err(TemperatureFailure::NonPositive);
            }
        }
        for (t, d) in theta.iter_mut().zip(&rhs) {
            *t += lambda * d;
        }
    }
    Err(TemperatureFailure::NotConverged { residual: last })
}
