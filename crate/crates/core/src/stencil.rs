//! Spatial stencils shared by the semi-implicit solver, the explicit
//! reference integrator and the diagnostics.
//!
//! Cell-centred diffusion uses face conductances `kk[f]`, `f = 0..=M`,
//! with flux `kk[f] * (x[f] - x[f - 1]) / dx`. Interior faces take the
//! harmonic mean of the adjacent cell coefficients; a Dirichlet end face
//! sits half a cell from the centre, which doubles its conductance; an
//! insulated end has zero conductance.

use crate::boundary::{EndValues, ThetaEnd};
use crate::util::harmonic;
use crate::PhysicalParams;

pub(crate) fn face_conductance(
    cell_coeff: &[f64],
    left_dirichlet: bool,
    right_dirichlet: bool,
) -> Vec<f64> {
    let m = cell_coeff.len();
    let mut kk = Vec::with_capacity(m + 1);
    kk.push(if left_dirichlet { 2.0 * cell_coeff[0] } else { 0.0 });
    for f in 1..m {
        kk.push(harmonic(cell_coeff[f - 1], cell_coeff[f]));
    }
    kk.push(if right_dirichlet {
        2.0 * cell_coeff[m - 1]
    } else {
        0.0
    });
    kk
}

/// Face differences `(x[f] - x[f - 1]) / dx` with the end values standing
/// in for the missing neighbours. Multiply by `kk` for the flux.
pub(crate) fn face_differences(x: &[f64], left: f64, right: f64, dx: f64) -> Vec<f64> {
    let m = x.len();
    let mut d = Vec::with_capacity(m + 1);
    d.push((x[0] - left) / dx);
    for f in 1..m {
        d.push((x[f] - x[f - 1]) / dx);
    }
    d.push((right - x[m - 1]) / dx);
    d
}

/// Quadrature weight of face `f`: a full dual cell inside, half at the ends.
#[inline]
pub(crate) fn face_weight(f: usize, cells: usize, dx: f64) -> f64 {
    if f == 0 || f == cells {
        0.5 * dx
    } else {
        dx
    }
}

/// Gradient-to-difference factor at face `f` (2 at the end faces, whose
/// end value sits half a cell away).
#[inline]
pub(crate) fn face_gradient_factor(f: usize, cells: usize) -> f64 {
    if f == 0 || f == cells {
        2.0
    } else {
        1.0
    }
}

pub(crate) fn theta_end_value(end: ThetaEnd, adjacent: f64) -> f64 {
    match end {
        ThetaEnd::Dirichlet(g) => g,
        ThetaEnd::Insulated => adjacent,
    }
}

#[inline]
pub(crate) fn is_dirichlet(end: ThetaEnd) -> bool {
    matches!(end, ThetaEnd::Dirichlet(_))
}

/// Viscous coefficient `μ(v) / v` per cell.
pub(crate) fn viscous_coeff(v: &[f64], p: &PhysicalParams) -> Vec<f64> {
    v.iter().map(|&vc| p.mu(vc) / vc).collect()
}

/// `P + |b|²/2` per cell.
pub(crate) fn total_pressure(v: &[f64], theta: &[f64], b: &[[f64; 2]], p: &PhysicalParams) -> Vec<f64> {
    v.iter()
        .zip(theta)
        .zip(b)
        .map(|((&vc, &th), bc)| p.pressure_of(vc, th) + 0.5 * (bc[0] * bc[0] + bc[1] * bc[1]))
        .collect()
}

/// Cell gradient `(x[c + 1] - x[c]) / dx` of a node field.
pub(crate) fn node_gradient(x: &[f64], dx: f64) -> Vec<f64> {
    x.windows(2).map(|w| (w[1] - w[0]) / dx).collect()
}

pub(crate) fn component(x: &[[f64; 2]], k: usize) -> Vec<f64> {
    x.iter().map(|a| a[k]).collect()
}

/// Conductance of the magnetic diffusion `ν / v` at every face.
pub(crate) fn magnetic_conductance(v: &[f64], p: &PhysicalParams) -> Vec<f64> {
    let coeff: Vec<f64> = v.iter().map(|&vc| p.nu / vc).collect();
    face_conductance(&coeff, true, true)
}

/// Heat conductance `κ̃ θ^β / v` at every face.
pub(crate) fn heat_conductance(theta: &[f64], v: &[f64], p: &PhysicalParams, left: ThetaEnd, right: ThetaEnd) -> Vec<f64> {
    let coeff: Vec<f64> = theta.iter().zip(v).map(|(&t, &vc)| p.kappa_of(t) / vc).collect();
    face_conductance(&coeff, is_dirichlet(left), is_dirichlet(right))
}

/// Magnetic dissipation density `ν |b_x|² / v` at every face.
pub(crate) fn magnetic_face_dissipation(b: &[[f64; 2]], kk: &[f64], left: &EndValues, right: &EndValues, dx: f64) -> Vec<f64> {
    let m = b.len();
    let mut out = vec![0.0; m + 1];
    for k in 0..2 {
        let d = face_differences(&component(b, k), left.b[k], right.b[k], dx);
        for f in 0..=m {
            let g = face_gradient_factor(f, m) * d[f];
            // kk already carries the factor 2 at the ends
            out[f] += kk[f] / face_gradient_factor(f, m) * g * g;
        }
    }
    out
}
