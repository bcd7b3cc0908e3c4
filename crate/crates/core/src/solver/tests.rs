use super::stages::*;
use super::*;
use crate::profile::{make_initial_state, GaussianBump, InitialProfile};
use crate::util::sum;

fn unit(alpha: f64, beta: f64) -> PhysicalParams {
    PhysicalParams::normalized(alpha, beta).unwrap()
}

fn bumpy(grid: Grid, bc: BoundaryCondition) -> GasState {
    let mid = grid.left_edge + 0.5 * grid.length();
    let mut a = GaussianBump::at(mid - 1.0, 1.2);
    a.v = 0.8;
    a.theta = -0.4;
    a.u = 0.3;
    a.b = [0.5, -0.2];
    a.w = [0.2, 0.1];
    let mut b = GaussianBump::at(mid + 1.5, 0.8);
    b.v = -0.5;
    b.theta = 1.5;
    b.u = -0.4;
    b.b = [-0.3, 0.4];
    b.w = [-0.1, 0.3];
    make_initial_state(grid, &InitialProfile::Gaussian(vec![a, b]), bc).unwrap()
}

#[test]
fn dt_examples() {
    let p = unit(0.0, 1.0);
    let g = Grid::new(10, 1.0, 0.0).unwrap();
    let ctl = StepControl::default();
    let s = GasState::reference(g);
    let dt = compute_dt(&s, &p, &ctl);
    assert!((dt - 0.4 * 0.1 / 2f64.sqrt()).abs() < 1e-15);
    assert!((dt - 0.028284).abs() < 1e-6);

    let mut s = GasState::reference(g);
    for b in &mut s.b {
        *b = [1.0, 1.0];
    }
    assert!((compute_dt(&s, &p, &ctl) - 0.02).abs() < 1e-15);
}

#[test]
fn dt_is_always_clamped() {
    let p = unit(1.0, 1.0);
    let g = Grid::new(16, 16.0, 0.0).unwrap();
    let ctl = StepControl {
        dt_max: 1e-3,
        dt_min: 1e-6,
        ..StepControl::default()
    };
    let mut s = GasState::reference(g);
    assert_eq!(compute_dt(&s, &p, &ctl), 1e-3);
    s.theta[3] = 1e30;
    assert_eq!(compute_dt(&s, &p, &ctl), 1e-6);
    s.theta[3] = f64::NAN;
    let dt = compute_dt(&s, &p, &ctl);
    assert!((ctl.dt_min..=ctl.dt_max).contains(&dt));
}

#[test]
fn equilibrium_is_a_fixed_point_for_every_dt_and_regime() {
    let p = unit(1.0, 0.5);
    for bc in BoundaryCondition::ALL {
        let g = Grid::new(32, 16.0, bc.default_left_edge(16.0)).unwrap();
        let s = GasState::reference(g);
        for dt in [1e-8, 1e-3, 0.5, 40.0] {
            let (next, report) = advance(&s, &p, &bc, &StepControl::default(), dt).unwrap();
            assert_eq!(next.max_deviation_from_reference(), 0.0, "{bc} dt={dt}");
            assert_eq!(report.newton_iterations, 1);
            assert_eq!(report.retries, 0);
            assert_eq!(next.step, 1);
            assert_eq!(next.t, dt);
        }
    }
}

#[test]
fn volume_stage_is_conservative() {
    let v = vec![1.0, 0.5, 2.0, 1.5];
    let u = vec![0.1, -0.3, 0.7, 0.2, -0.4];
    let dx = 0.25;
    let dt = 0.01;
    let out = substep_volume(&v, &u, None, dx, dt);
    let before = sum(v.iter().map(|x| x * dx));
    let after = sum(out.iter().map(|x| x * dx));
    assert!((after - before - dt * (u[4] - u[0])).abs() <= 1e-15 * before);
}

#[test]
fn velocity_stage_conserves_momentum_up_to_end_stress() {
    let p = unit(1.0, 1.0);
    let g = Grid::new(64, 16.0, -8.0).unwrap();
    let s = bumpy(g, BoundaryCondition::CauchyFarField);
    let bnd = BoundaryCondition::CauchyFarField.values();
    let dt = 0.01;
    let out = substep_velocity(&s.u, &s.v, &s.theta, &s.b, &p, &bnd, None, g.dx, dt).unwrap();
    let before = sum(s.u.iter().map(|x| x * g.dx));
    let after = sum(out.u.iter().map(|x| x * g.dx));
    let flux = dt * (out.stress[63] - out.stress[0]);
    assert!((after - before - flux).abs() <= 1e-14, "{}", after - before - flux);
    assert!(out.viscous_heating.iter().all(|&q| q >= 0.0));
}

#[test]
fn transverse_and_induction_stages_vanish_on_zero_fields() {
    let p = unit(0.0, 1.0);
    let g = Grid::new(8, 8.0, 0.0).unwrap();
    let bnd = BoundaryCondition::IsothermalWallLeft.values();
    let v = vec![1.3; 8];
    let w = vec![[0.0; 2]; 9];
    let b = vec![[0.0; 2]; 8];
    let tw = substep_transverse_w(&w, &v, &b, &p, &bnd, None, g.dx, 0.1).unwrap();
    assert!(tw.w.iter().all(|x| *x == [0.0, 0.0]));
    let ind = substep_induction(&b, &v, &v, &tw.w, &p, &bnd, None, g.dx, 0.1).unwrap();
    assert!(ind.b.iter().all(|x| *x == [0.0, 0.0]));
}

#[test]
fn induction_stage_preserves_flux_of_vb_without_diffusion_at_ends() {
    // With b = 0 at both end faces and no end velocity, Σ v b changes only
    // through the diffusive end fluxes.
    let p = unit(0.0, 1.0);
    let g = Grid::new(32, 16.0, -8.0).unwrap();
    let s = bumpy(g, BoundaryCondition::CauchyFarField);
    let bnd = BoundaryCondition::CauchyFarField.values();
    let dt = 0.05;
    let v_new: Vec<f64> = s.v.iter().map(|x| x * 1.01).collect();
    let ind = substep_induction(&s.b, &s.v, &v_new, &s.w, &p, &bnd, None, g.dx, dt).unwrap();
    for k in 0..2 {
        let before: f64 = (0..32).map(|c| s.v[c] * s.b[c][k]).sum::<f64>() * g.dx;
        let after: f64 = (0..32).map(|c| v_new[c] * ind.b[c][k]).sum::<f64>() * g.dx;
        let kk_l = 2.0 * p.nu / v_new[0];
        let kk_r = 2.0 * p.nu / v_new[31];
        let flux = dt * (kk_r * (0.0 - ind.b[31][k]) / g.dx - kk_l * (ind.b[0][k] - 0.0) / g.dx);
        let w_flux = dt * (s.w[32][k] - s.w[0][k]);
        assert!((after - before - flux - w_flux).abs() < 1e-13);
    }
}

#[test]
fn temperature_newton_converges_quickly_and_to_tolerance() {
    let p = unit(1.0, 1.0);
    let g = Grid::new(64, 16.0, -8.0).unwrap();
    let s = bumpy(g, BoundaryCondition::CauchyFarField);
    let bnd = BoundaryCondition::CauchyFarField.values();
    let div_u: Vec<f64> = (0..64).map(|c| (s.u[c + 1] - s.u[c]) / g.dx).collect();
    let heating = vec![0.05; 64];
    let prob = TemperatureProblem {
        theta_old: &s.theta,
        v: &s.v,
        div_u: &div_u,
        heating: &heating,
        source: None,
        dx: g.dx,
        dt: 0.05,
    };
    let sol = substep_temperature(&prob, &p, &bnd, 1e-12, 50).unwrap();
    assert!(sol.iterations <= 8, "{}", sol.iterations);
    assert!(!sol.picard);
    let (res, _) = temperature_residual(&sol.theta, &prob, &p, &bnd);
    assert!(res.iter().all(|r| r.abs() <= 1e-12));
}

#[test]
fn temperature_stage_with_beta_zero_is_a_linear_backward_euler_step() {
    let mut p = unit(0.0, 0.0);
    p.kappa = 0.7;
    p.cv = 2.0;
    let g = Grid::new(16, 8.0, 0.0).unwrap();
    let bnd = BoundaryCondition::InsulatedWallLeft.values();
    let theta_old: Vec<f64> = (0..16).map(|c| 1.0 + 0.5 * (c as f64 * 0.4).sin()).collect();
    let v = vec![1.0; 16];
    let zero = vec![0.0; 16];
    let dt = 0.3;
    let prob = TemperatureProblem {
        theta_old: &theta_old,
        v: &v,
        div_u: &zero,
        heating: &zero,
        source: None,
        dx: g.dx,
        dt,
    };
    let sol = substep_temperature(&prob, &p, &bnd, 1e-13, 50).unwrap();
    assert!(sol.iterations <= 2);
    // independent assembly of (I - dt κ/c_v Δ) θ = θ_old with an insulated
    // left end and a Dirichlet (θ = 1) half-cell right end
    let r = dt * p.kappa / (p.cv * g.dx * g.dx);
    let mut sys = crate::tridiag::Tridiagonal::new(16);
    let mut rhs = theta_old.clone();
    for c in 0..16 {
        let left = if c == 0 { 0.0 } else { r };
        let right = if c == 15 { 2.0 * r } else { r };
        sys.lower[c] = -left;
        sys.upper[c] = if c == 15 { 0.0 } else { -r };
        sys.diag[c] = 1.0 + left + right;
    }
    rhs[15] += 2.0 * r;
    sys.solve_in_place(&mut rhs).unwrap();
    for c in 0..16 {
        assert!((sol.theta[c] - rhs[c]).abs() < 1e-12);
    }
}

#[test]
fn discrete_mass_and_momentum_budgets_close() {
    let p = unit(1.0, 1.0);
    for bc in BoundaryCondition::ALL {
        let g = Grid::new(128, 16.0, bc.default_left_edge(16.0)).unwrap();
        let mut s = bumpy(g, bc);
        if bc.has_left_wall() {
            s = bumpy_wall(g, bc);
        }
        let ctl = StepControl::default();
        for _ in 0..50 {
            let (next, r) = step(&s, &p, bc, &ctl).unwrap();
            let m0 = sum(s.v.iter().map(|x| x * g.dx));
            let m1 = sum(next.v.iter().map(|x| x * g.dx));
            assert!((m1 - m0 - r.mass_flux).abs() <= 1e-13 * m0);
            let p0 = sum(s.u.iter().map(|x| x * g.dx));
            let p1 = sum(next.u.iter().map(|x| x * g.dx));
            let scale = sum(next.u.iter().map(|x| x.abs() * g.dx)).max(r.momentum_flux.abs());
            assert!((p1 - p0 - r.momentum_flux).abs() <= 1e-12 * scale, "{bc}");
            s = next;
        }
    }
}

fn bumpy_wall(g: Grid, bc: BoundaryCondition) -> GasState {
    let mid = g.left_edge + 0.5 * g.length();
    let mut a = GaussianBump::at(mid, 1.0);
    a.v = 0.6;
    a.theta = 0.8;
    a.u = -0.3;
    a.b = [0.4, 0.1];
    a.w = [0.1, -0.2];
    make_initial_state(g, &InitialProfile::Gaussian(vec![a]), bc).unwrap()
}

#[test]
fn component_swap_commutes_with_stepping() {
    let p = unit(1.0, 1.0);
    let g = Grid::new(64, 16.0, -8.0).unwrap();
    let s = bumpy(g, BoundaryCondition::CauchyFarField);
    let mut swapped = s.clone();
    swapped.swap_components();
    let ctl = StepControl::default();
    let a = run_until(s, 0.3, &p, BoundaryCondition::CauchyFarField, &ctl, |_, _| {}).unwrap();
    let mut b = run_until(swapped, 0.3, &p, BoundaryCondition::CauchyFarField, &ctl, |_, _| {}).unwrap();
    b.swap_components();
    assert_eq!(a, b);
}

#[test]
fn runs_are_deterministic() {
    let p = unit(0.0, 0.5);
    let g = Grid::new(64, 16.0, 0.0).unwrap();
    let bc = BoundaryCondition::InsulatedWallLeft;
    let s = bumpy_wall(g, bc);
    let ctl = StepControl::default();
    let mut ta = Vec::new();
    let mut tb = Vec::new();
    let a = run_until(s.clone(), 0.5, &p, bc, &ctl, |st, _| ta.push(st.clone())).unwrap();
    let b = run_until(s, 0.5, &p, bc, &ctl, |st, _| tb.push(st.clone())).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
}

#[test]
fn oversized_step_is_retried_with_smaller_dt() {
    let p = unit(0.0, 1.0);
    let g = Grid::new(32, 8.0, -4.0).unwrap();
    let mut bump = GaussianBump::at(0.0, 0.5);
    bump.theta = 30.0;
    bump.v = -0.8;
    let s = make_initial_state(g, &InitialProfile::Gaussian(vec![bump]), BoundaryCondition::CauchyFarField).unwrap();
    let (next, report) = advance(&s, &p, &BoundaryCondition::CauchyFarField, &StepControl::default(), 2.0).unwrap();
    assert!(report.retries > 0);
    assert_eq!(report.dt_used, 2.0 / f64::from(1u32 << report.retries));
    assert!(next.is_positive());

    let strict = StepControl {
        retry_max: 0,
        ..StepControl::default()
    };
    let err = advance(&s, &p, &BoundaryCondition::CauchyFarField, &strict, 2.0).unwrap_err();
    assert!(err.is_step_failure(), "{err}");
    assert!(err.to_string().contains("t = "));
}

#[test]
fn run_until_handles_empty_interval_and_lands_on_t_end() {
    let p = unit(0.0, 1.0);
    let g = Grid::new(16, 16.0, -8.0).unwrap();
    let s = bumpy(g, BoundaryCondition::CauchyFarField);
    let mut calls = 0;
    let same = run_until(s.clone(), 0.0, &p, BoundaryCondition::CauchyFarField, &StepControl::default(), |_, _| calls += 1).unwrap();
    assert_eq!(calls, 0);
    assert_eq!(same, s);

    let mut times = Vec::new();
    let end = run_until(s.clone(), 0.737, &p, BoundaryCondition::CauchyFarField, &StepControl::default(), |st, _| {
        times.push(st.t)
    })
    .unwrap();
    assert_eq!(end.t, 0.737);
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    assert!(run_until(end, 0.5, &p, BoundaryCondition::CauchyFarField, &StepControl::default(), |_, _| {}).is_err());
}

#[test]
fn constant_state_survives_long_runs() {
    let p = unit(1.0, 1.0);
    for bc in BoundaryCondition::ALL {
        let g = Grid::new(32, 32.0, bc.default_left_edge(32.0)).unwrap();
        let end = run_until(GasState::reference(g), 10.0, &p, bc, &StepControl::default(), |_, _| {}).unwrap();
        assert!(end.max_deviation_from_reference() <= 1e-12);
        assert_eq!(end.t, 10.0);
    }
}
