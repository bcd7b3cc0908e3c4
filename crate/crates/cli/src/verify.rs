//! The verification studies behind `mhd1d verify`. Each study yields one
//! JSON-lines record tagged with `study` and a `pass` flag.

use mhd1d_core::verification::{
    convergence_study, explicit_reference, heat_fourier_solution, max_field_difference, temporal_study,
    ConvergenceProblem, ConvergenceReport, Field,
};
use mhd1d_core::{
    make_initial_state, run_until, BoundaryCondition, GasState, GaussianBump, Grid, InitialProfile, PhysicalParams,
    StepControl,
};
use serde_json::{json, Map, Value};

pub const SPATIAL_ORDER_MIN: f64 = 1.9;
pub const TEMPORAL_ORDER_MIN: f64 = 0.9;
pub const ORACLE_TOL: f64 = 1e-4;
pub const FOURIER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub study: &'static str,
    pub pass: bool,
    pub detail: Value,
}

impl StudyResult {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("study".into(), json!(self.study));
        m.insert("pass".into(), json!(self.pass));
        if let Value::Object(d) = &self.detail {
            m.extend(d.clone());
        }
        Value::Object(m)
    }
}

fn failed(study: &'static str, e: impl std::fmt::Display) -> StudyResult {
    StudyResult {
        study,
        pass: false,
        detail: json!({ "error": e.to_string() }),
    }
}

fn orders_json(rep: &ConvergenceReport) -> Value {
    let mut m = Map::new();
    for f in Field::ALL {
        m.insert(f.as_str().into(), rep.order(f).map_or(json!("exact"), |q| json!(q)));
    }
    Value::Object(m)
}

fn levels_json(rep: &ConvergenceReport) -> Value {
    Value::Array(
        rep.levels
            .iter()
            .map(|l| json!({ "cells": l.cells, "dt": l.dt, "steps": l.steps, "errors": l.errors.to_vec() }))
            .collect(),
    )
}

/// Manufactured-solution spatial order over `M = 64, 128, 256` with `dt ∝ dx²`.
pub fn mms_spatial(alpha: f64, beta: f64) -> StudyResult {
    let p = match PhysicalParams::normalized(alpha, beta) {
        Ok(p) => p,
        Err(e) => return failed("mms_spatial", e),
    };
    let prob = ConvergenceProblem::standard(p);
    match convergence_study(&prob, 3) {
        Ok(rep) => StudyResult {
            study: "mms_spatial",
            pass: rep.orders.iter().all(|q| q.map_or(true, |q| q >= SPATIAL_ORDER_MIN)),
            detail: json!({
                "alpha": alpha, "beta": beta, "threshold": SPATIAL_ORDER_MIN,
                "orders": orders_json(&rep), "levels": levels_json(&rep),
            }),
        },
        Err(e) => failed("mms_spatial", e),
    }
}

/// Temporal order at `M = 64`, `dt = 0.01 / 2^k`, `k = 0..4`.
pub fn mms_temporal(alpha: f64, beta: f64) -> StudyResult {
    let p = match PhysicalParams::normalized(alpha, beta) {
        Ok(p) => p,
        Err(e) => return failed("mms_temporal", e),
    };
    let prob = ConvergenceProblem::standard(p);
    match temporal_study(&prob, 64, 0.01, 4) {
        Ok(rep) => StudyResult {
            study: "mms_temporal",
            pass: rep.orders.iter().all(|q| q.map_or(true, |q| q >= TEMPORAL_ORDER_MIN)),
            detail: json!({
                "alpha": alpha, "beta": beta, "threshold": TEMPORAL_ORDER_MIN,
                "orders": orders_json(&rep), "levels": levels_json(&rep),
            }),
        },
        Err(e) => failed("mms_temporal", e),
    }
}

/// Smooth far-field data on 16 cells used by the oracle comparison.
pub fn oracle_state() -> GasState {
    let mut bump = GaussianBump::at(0.0, 1.0);
    bump.v = 0.2;
    bump.u = 0.1;
    bump.theta = 0.3;
    bump.b = [0.2, -0.1];
    bump.w = [0.1, 0.05];
    make_initial_state(
        Grid::new(16, 12.0, -6.0).expect("valid grid"),
        &InitialProfile::Gaussian(vec![bump]),
        BoundaryCondition::CauchyFarField,
    )
    .expect("compatible data")
}

/// Semi-implicit solver (`dt ≤ 1e-4`) against explicit RK4 at `dt = 1e-6`
/// on 16 cells to `t = 0.01`.
pub fn oracle(alpha: f64, beta: f64) -> StudyResult {
    let p = match PhysicalParams::normalized(alpha, beta) {
        Ok(p) => p,
        Err(e) => return failed("oracle", e),
    };
    let bc = BoundaryCondition::CauchyFarField;
    let s0 = oracle_state();
    let reference = match explicit_reference(&s0, 0.01, &p, bc, 1e-6) {
        Ok(s) => s,
        Err(e) => return failed("oracle", e),
    };
    let ctl = StepControl {
        dt_max: 1e-4,
        ..StepControl::default()
    };
    match run_until(s0, 0.01, &p, bc, &ctl, |_, _| {}) {
        Ok(out) => {
            let diff = max_field_difference(&out, &reference);
            StudyResult {
                study: "oracle",
                pass: diff <= ORACLE_TOL,
                detail: json!({ "alpha": alpha, "beta": beta, "max_abs_difference": diff, "tolerance": ORACLE_TOL }),
            }
        }
        Err(e) => failed("oracle", e),
    }
}

/// Explicit reference on the linear heat problem against its exact
/// discrete-Fourier solution.
pub fn heat_fourier() -> StudyResult {
    let p = match PhysicalParams::new(1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1e-14, 1.0) {
        Ok(p) => p,
        Err(e) => return failed("heat_fourier", e),
    };
    let g = Grid::new(16, 4.0, -2.0).expect("valid grid");
    let mut s = GasState::reference(g);
    for (c, x) in g.center_coords().iter().enumerate() {
        s.theta[c] = 1.0 + 0.5 * (-x * x).exp();
    }
    let exact = heat_fourier_solution(&s.theta, &g, p.kappa / p.cv, 0.01);
    match explicit_reference(&s, 0.01, &p, BoundaryCondition::CauchyFarField, 1e-5) {
        Ok(out) => {
            let err = out.theta.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            StudyResult {
                study: "heat_fourier",
                pass: err <= FOURIER_TOL,
                detail: json!({ "max_abs_difference": err, "tolerance": FOURIER_TOL }),
            }
        }
        Err(e) => failed("heat_fourier", e),
    }
}

/// Every study, in a fixed order.
pub fn all_studies() -> Vec<StudyResult> {
    let mut out = vec![heat_fourier()];
    for alpha in [0.0, 1.0] {
        out.push(oracle(alpha, 1.0));
    }
    for (alpha, beta) in [(0.0, 1.0), (1.0, 0.5)] {
        out.push(mms_spatial(alpha, beta));
    }
    out.push(mms_temporal(0.5, 1.0));
    out
}
