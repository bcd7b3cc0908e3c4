//! Classical RK4 integration of the semi-discrete system built from the
//! same stencils as the semi-implicit solver. Only the time integration
//! differs, so comparing the two isolates the splitting error.

use crate::boundary::{BoundaryCondition, BoundaryValues};
use crate::constitutive::norm2;
use crate::solver::{Drive, Sources};
use crate::stencil::{
    component, face_differences, heat_conductance, magnetic_conductance, magnetic_face_dissipation,
    theta_end_value, total_pressure, viscous_coeff,
};
use crate::util::min_max;
use crate::{Error, GasState, Grid, PhysicalParams, Result};

/// Largest grid the reference integrator accepts.
pub const MAX_REFERENCE_CELLS: usize = 64;

#[derive(Debug, Clone)]
struct Fields {
    v: Vec<f64>,
    u: Vec<f64>,
    w: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
    theta: Vec<f64>,
}

impl Fields {
    fn of(s: &GasState) -> Self {
        Self {
            v: s.v.clone(),
            u: s.u.clone(),
            w: s.w.clone(),
            b: s.b.clone(),
            theta: s.theta.clone(),
        }
    }

    /// `self + h * d`
    fn axpy(&self, h: f64, d: &Fields) -> Fields {
        let lin = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + h * y).collect();
        let lin2 = |a: &[[f64; 2]], b: &[[f64; 2]]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| [x[0] + h * y[0], x[1] + h * y[1]])
                .collect()
        };
        Fields {
            v: lin(&self.v, &d.v),
            u: lin(&self.u, &d.u),
            w: lin2(&self.w, &d.w),
            b: lin2(&self.b, &d.b),
            theta: lin(&self.theta, &d.theta),
        }
    }

    fn impose(&mut self, bnd: &BoundaryValues) {
        let m = self.v.len();
        self.u[0] = bnd.left.u;
        self.u[m] = bnd.right.u;
        self.w[0] = bnd.left.w;
        self.w[m] = bnd.right.w;
    }

    fn is_positive(&self) -> bool {
        min_max(&self.v).0 > 0.0 && min_max(&self.theta).0 > 0.0
    }
}

/// Time derivatives of the semi-discrete system. End-node velocities are
/// algebraic (imposed), so their derivatives are zero.
fn rhs(f: &Fields, p: &PhysicalParams, bnd: &BoundaryValues, src: Option<&Sources>, dx: f64) -> Fields {
    let m = f.v.len();
    let visc = viscous_coeff(&f.v, p);
    let press = total_pressure(&f.v, &f.theta, &f.b, p);
    let lam: Vec<f64> = f.v.iter().map(|&v| p.lambda / v).collect();
    let dx2 = dx * dx;

    let mut du = vec![0.0; m + 1];
    let mut dw = vec![[0.0; 2]; m + 1];
    for j in 1..m {
        du[j] = (visc[j] * (f.u[j + 1] - f.u[j]) - visc[j - 1] * (f.u[j] - f.u[j - 1])) / dx2
            - (press[j] - press[j - 1]) / dx;
        for k in 0..2 {
            dw[j][k] = (lam[j] * (f.w[j + 1][k] - f.w[j][k]) - lam[j - 1] * (f.w[j][k] - f.w[j - 1][k])) / dx2
                + (f.b[j][k] - f.b[j - 1][k]) / dx;
        }
        if let Some(s) = src {
            du[j] += s.u[j];
            dw[j][0] += s.w[j][0];
            dw[j][1] += s.w[j][1];
        }
    }

    let ux: Vec<f64> = (0..m).map(|c| (f.u[c + 1] - f.u[c]) / dx).collect();
    let dv: Vec<f64> = (0..m)
        .map(|c| ux[c] + src.map_or(0.0, |s| s.v[c]))
        .collect();

    let kb = magnetic_conductance(&f.v, p);
    let mut db = vec![[0.0; 2]; m];
    for k in 0..2 {
        let d = face_differences(&component(&f.b, k), bnd.left.b[k], bnd.right.b[k], dx);
        for c in 0..m {
            let mut dvb = (kb[c + 1] * d[c + 1] - kb[c] * d[c]) / dx + (f.w[c + 1][k] - f.w[c][k]) / dx;
            if let Some(s) = src {
                dvb += s.b[c][k];
            }
            db[c][k] = (dvb - f.b[c][k] * dv[c]) / f.v[c];
        }
    }

    let kh = heat_conductance(&f.theta, &f.v, p, bnd.left.theta, bnd.right.theta);
    let left = theta_end_value(bnd.left.theta, f.theta[0]);
    let right = theta_end_value(bnd.right.theta, f.theta[m - 1]);
    let dth = face_differences(&f.theta, left, right, dx);
    let mag = magnetic_face_dissipation(&f.b, &kb, &bnd.left, &bnd.right, dx);
    let dtheta = (0..m)
        .map(|c| {
            let wx = [(f.w[c + 1][0] - f.w[c][0]) / dx, (f.w[c + 1][1] - f.w[c][1]) / dx];
            let heating = visc[c] * ux[c] * ux[c] + lam[c] * norm2(wx) + 0.5 * (mag[c] + mag[c + 1]);
            let mut rate = -p.r * f.theta[c] * ux[c] / f.v[c] + (kh[c + 1] * dth[c + 1] - kh[c] * dth[c]) / dx + heating;
            if let Some(s) = src {
                rate += s.theta[c];
            }
            rate / p.cv
        })
        .collect();

    Fields {
        v: dv,
        u: du,
        w: dw,
        b: db,
        theta: dtheta,
    }
}

/// Largest `dt` the explicit reference accepts for `state`:
/// `0.2 dx² min v / max(μ(v), λ, ν, κ̃ max θ^β / c_v)`.
pub fn stable_reference_dt(state: &GasState, p: &PhysicalParams) -> f64 {
    let (v_min, _) = min_max(&state.v);
    let (th_lo, th_hi) = min_max(&state.theta);
    let mu_max = state.v.iter().map(|&v| p.mu(v)).fold(0.0, f64::max);
    let k_max = p.kappa_of(th_lo).max(p.kappa_of(th_hi)) / p.cv;
    let diff = mu_max.max(p.lambda).max(p.nu).max(k_max);
    0.2 * state.grid.dx * state.grid.dx * v_min / diff
}

/// Integrate from `state0` to `t_end` under a fixed boundary regime.
pub fn explicit_reference(
    state0: &GasState,
    t_end: f64,
    p: &PhysicalParams,
    bc: BoundaryCondition,
    dt_ref: f64,
) -> Result<GasState> {
    explicit_reference_driven(state0, t_end, p, &bc, dt_ref)
}

/// As [`explicit_reference`], with time-dependent end values and forcing.
/// The step is shortened uniformly so the run lands on `t_end`.
pub fn explicit_reference_driven<D: Drive + ?Sized>(
    state0: &GasState,
    t_end: f64,
    p: &PhysicalParams,
    drive: &D,
    dt_ref: f64,
) -> Result<GasState> {
    state0.check_shape()?;
    let g = state0.grid;
    if g.cells > MAX_REFERENCE_CELLS {
        return Err(Error::InvalidControl(format!(
            "explicit reference is limited to {MAX_REFERENCE_CELLS} cells (got {})",
            g.cells
        )));
    }
    if !state0.is_positive() {
        return Err(Error::Domain("explicit reference needs a positive initial state".into()));
    }
    let bound = stable_reference_dt(state0, p);
    if !(dt_ref > 0.0 && dt_ref <= bound) {
        return Err(Error::InvalidControl(format!(
            "dt_ref = {dt_ref:e} violates the explicit stability bound {bound:e}"
        )));
    }
    let span = t_end - state0.t;
    if !(span >= 0.0) {
        return Err(Error::InvalidControl(format!("t_end = {t_end} precedes t = {}", state0.t)));
    }
    let steps = (span / dt_ref).ceil() as u64;
    if steps == 0 {
        return Ok(state0.clone());
    }
    let h = span / steps as f64;
    let dx = g.dx;
    let mut y = Fields::of(state0);
    for n in 0..steps {
        let t = state0.t + n as f64 * h;
        let eval = |f: &Fields, s: f64| {
            let bnd = drive.boundary(s);
            let src = drive.sources(&g, s);
            let mut f = f.clone();
            f.impose(&bnd);
            rhs(&f, p, &bnd, src.as_ref(), dx)
        };
        let k1 = eval(&y, t);
        let k2 = eval(&y.axpy(0.5 * h, &k1), t + 0.5 * h);
        let k3 = eval(&y.axpy(0.5 * h, &k2), t + 0.5 * h);
        let k4 = eval(&y.axpy(h, &k3), t + h);
        let mut next = y
            .axpy(h / 6.0, &k1)
            .axpy(h / 3.0, &k2)
            .axpy(h / 3.0, &k3)
            .axpy(h / 6.0, &k4);
        next.impose(&drive.boundary(t + h));
        if !next.is_positive() {
            return Err(Error::PositivityFailure {
                t,
                dt: h,
                min_v: min_max(&next.v).0,
                min_theta: min_max(&next.theta).0,
            });
        }
        y = next;
    }
    Ok(GasState {
        grid: g,
        v: y.v,
        u: y.u,
        w: y.w,
        b: y.b,
        theta: y.theta,
        t: t_end,
        step: state0.step + steps,
    })
}

/// Exact solution of the semi-discrete heat problem
/// `θ_c' = D (θ_{c+1} − 2θ_c + θ_{c−1}) / dx²` with both end faces held at
/// 1, by expansion in the DST-II eigenvectors `sin(πk(c + 1/2)/M)`.
pub fn heat_fourier_solution(theta0: &[f64], grid: &Grid, diffusivity: f64, t: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let m = theta0.len();
    let mf = m as f64;
    let mut out = vec![1.0; m];
    for k in 1..=m {
        let kf = k as f64;
        let mode: Vec<f64> = (0..m).map(|c| (PI * kf * (c as f64 + 0.5) / mf).sin()).collect();
        let norm: f64 = mode.iter().map(|x| x * x).sum();
        let coeff: f64 = mode.iter().zip(theta0).map(|(e, th)| e * (th - 1.0)).sum::<f64>() / norm;
        let s = (PI * kf / (2.0 * mf)).sin();
        let rate = -diffusivity * 4.0 * s * s / (grid.dx * grid.dx);
        let decay = (rate * t).exp();
        for c in 0..m {
            out[c] += coeff * decay * mode[c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::run_until;
    use crate::verification::max_field_difference;
    use crate::{make_initial_state, GaussianBump, InitialProfile, StepControl};

    fn smooth(alpha: f64) -> (GasState, PhysicalParams) {
        let mut bump = GaussianBump::at(0.0, 1.0);
        bump.v = 0.2;
        bump.u = 0.1;
        bump.theta = 0.3;
        bump.b = [0.2, -0.1];
        bump.w = [0.1, 0.05];
        let s = make_initial_state(
            Grid::new(16, 12.0, -6.0).unwrap(),
            &InitialProfile::Gaussian(vec![bump]),
            BoundaryCondition::CauchyFarField,
        )
        .unwrap();
        (s, PhysicalParams::normalized(alpha, 1.0).unwrap())
    }

    #[test]
    fn reference_state_is_a_fixed_point() {
        let p = PhysicalParams::normalized(1.0, 0.5).unwrap();
        for bc in BoundaryCondition::ALL {
            let g = Grid::new(16, 8.0, bc.default_left_edge(8.0)).unwrap();
            let s = GasState::reference(g);
            let out = explicit_reference(&s, 0.01, &p, bc, 1e-4).unwrap();
            assert_eq!(out.max_deviation_from_reference(), 0.0);
        }
    }

    #[test]
    fn rejects_unstable_steps_and_large_grids() {
        let (s, p) = smooth(0.0);
        let bound = stable_reference_dt(&s, &p);
        assert!(explicit_reference(&s, 0.01, &p, BoundaryCondition::CauchyFarField, 2.0 * bound).is_err());
        let big = GasState::reference(Grid::new(128, 8.0, -4.0).unwrap());
        assert!(explicit_reference(&big, 0.01, &p, BoundaryCondition::CauchyFarField, 1e-6).is_err());
    }

    #[test]
    fn heat_problem_matches_fourier_solution() {
        let p = PhysicalParams::new(1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1e-14, 1.0).unwrap();
        let g = Grid::new(16, 4.0, -2.0).unwrap();
        let mut s = GasState::reference(g);
        for (c, x) in g.center_coords().iter().enumerate() {
            s.theta[c] = 1.0 + 0.5 * (-x * x).exp();
        }
        let exact = heat_fourier_solution(&s.theta, &g, 1.0, 0.01);
        let out = explicit_reference(&s, 0.01, &p, BoundaryCondition::CauchyFarField, 1e-5).unwrap();
        let err = out.theta.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err:e}");
        // t = 0 reproduces the data
        let same = heat_fourier_solution(&s.theta, &g, 1.0, 0.0);
        assert!(same.iter().zip(&s.theta).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn reference_conserves_mass() {
        let (s, p) = smooth(1.0);
        let mass0: f64 = s.v.iter().sum::<f64>() * s.grid.dx;
        let out = explicit_reference(&s, 0.001, &p, BoundaryCondition::CauchyFarField, 1e-5).unwrap();
        let mass: f64 = out.v.iter().sum::<f64>() * out.grid.dx;
        // end velocities stay at zero, so the total volume is invariant
        assert!((mass - mass0).abs() <= 1e-13 * mass0);
    }

    #[test]
    fn semi_implicit_solver_agrees_with_reference() {
        for alpha in [0.0, 1.0] {
            let (s, p) = smooth(alpha);
            let bc = BoundaryCondition::CauchyFarField;
            let exact = explicit_reference(&s, 0.01, &p, bc, 1e-6).unwrap();
            let ctl = StepControl {
                dt_max: 1e-4,
                ..StepControl::default()
            };
            let out = run_until(s, 0.01, &p, bc, &ctl, |_, _| {}).unwrap();
            let err = max_field_difference(&out, &exact);
            assert!(err <= 1e-4, "alpha = {alpha}: {err:e}");
        }
    }
}
