//! Manufactured solution
//!
//! ```text
//! v = 1 + a_v sin(kx) e^{-t}      u = a_u sin(kx) e^{-t}      w_i = a_w,i sin(kx) e^{-t}
//! θ = 1 + a_θ cos(kx) e^{-t}      b_i = a_b,i cos(kx) e^{-t}
//! ```
//!
//! and the forcing that makes it exact, one term per equation:
//!
//! ```text
//! S_v = v_t − u_x
//! S_u = u_t + (P + |b|²/2)_x − g(v) u_xx − g'(v) v_x u_x,      g = μ(v)/v
//! S_w = w_t − b_x − λ (w_xx / v − w_x v_x / v²)
//! S_b = v_t b + v b_t − w_x − ν (b_xx / v − b_x v_x / v²)
//! S_θ = c_v θ_t + R θ u_x / v − κ̃ (β θ^{β−1} θ_x² + θ^β θ_xx − θ^β θ_x v_x / v) / v
//!       − (μ u_x² + λ |w_x|² + ν |b_x|²) / v
//! ```
//!
//! with `P_x = R (θ_x / v − θ v_x / v²)` and
//! `g'(v) = −μ̃₁ / v² − (α + 1) μ̃₂ v^{−α−2}`.

use crate::boundary::{BoundaryValues, EndValues, ThetaEnd};
use crate::solver::{Drive, Sources};
use crate::{Error, Grid, PhysicalParams, Result};

/// Smallest value `v` and `θ` may reach along the solution.
const POSITIVITY_MARGIN: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsSolution {
    pub k: f64,
    pub a_v: f64,
    pub a_u: f64,
    pub a_theta: f64,
    pub a_w: [f64; 2],
    pub a_b: [f64; 2],
}

/// Source terms at a single point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointSources {
    pub v: f64,
    pub u: f64,
    pub w: [f64; 2],
    pub b: [f64; 2],
    pub theta: f64,
}

/// Value and first two derivatives in `x`, plus `∂_t`.
#[derive(Debug, Clone, Copy)]
struct Jet {
    f: f64,
    x: f64,
    xx: f64,
    t: f64,
}

impl MmsSolution {
    /// All amplitudes zero: the far-field equilibrium.
    pub fn equilibrium(k: f64) -> Self {
        Self {
            k,
            a_v: 0.0,
            a_u: 0.0,
            a_theta: 0.0,
            a_w: [0.0; 2],
            a_b: [0.0; 2],
        }
    }

    /// A generic smooth configuration with every field active.
    pub fn generic(k: f64) -> Self {
        Self {
            k,
            a_v: 0.3,
            a_u: 0.2,
            a_theta: 0.4,
            a_w: [0.15, -0.1],
            a_b: [0.25, 0.2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.k, self.a_v, self.a_u, self.a_theta, self.a_w[0], self.a_w[1], self.a_b[0], self.a_b[1]];
        if all.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("manufactured solution has non-finite data".into()));
        }
        let limit = 1.0 - POSITIVITY_MARGIN;
        if self.a_v.abs() > limit || self.a_theta.abs() > limit {
            return Err(Error::Domain(format!(
                "|a_v| and |a_theta| must be <= {limit} so that v, theta >= {POSITIVITY_MARGIN} (got {}, {})",
                self.a_v, self.a_theta
            )));
        }
        Ok(())
    }

    fn sine(&self, a: f64, x: f64, t: f64) -> Jet {
        let e = (-t).exp();
        let (s, c) = (self.k * x).sin_cos();
        Jet {
            f: a * s * e,
            x: a * self.k * c * e,
            xx: -a * self.k * self.k * s * e,
            t: -a * s * e,
        }
    }

    fn cosine(&self, a: f64, x: f64, t: f64) -> Jet {
        let e = (-t).exp();
        let (s, c) = (self.k * x).sin_cos();
        Jet {
            f: a * c * e,
            x: -a * self.k * s * e,
            xx: -a * self.k * self.k * c * e,
            t: -a * c * e,
        }
    }

    pub fn v(&self, x: f64, t: f64) -> f64 {
        1.0 + self.sine(self.a_v, x, t).f
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        self.sine(self.a_u, x, t).f
    }

    pub fn theta(&self, x: f64, t: f64) -> f64 {
        1.0 + self.cosine(self.a_theta, x, t).f
    }

    pub fn w(&self, x: f64, t: f64) -> [f64; 2] {
        [self.sine(self.a_w[0], x, t).f, self.sine(self.a_w[1], x, t).f]
    }

    pub fn b(&self, x: f64, t: f64) -> [f64; 2] {
        [self.cosine(self.a_b[0], x, t).f, self.cosine(self.a_b[1], x, t).f]
    }

    /// Forcing terms at `(x, t)`.
    pub fn sources_at(&self, x: f64, t: f64, p: &PhysicalParams) -> PointSources {
        let v = self.sine(self.a_v, x, t);
        let v = Jet { f: 1.0 + v.f, ..v };
        let u = self.sine(self.a_u, x, t);
        let th = self.cosine(self.a_theta, x, t);
        let th = Jet { f: 1.0 + th.f, ..th };
        let w = [self.sine(self.a_w[0], x, t), self.sine(self.a_w[1], x, t)];
        let b = [self.cosine(self.a_b[0], x, t), self.cosine(self.a_b[1], x, t)];

        let g = p.mu(v.f) / v.f;
        let dg = -p.mu1 / (v.f * v.f) - (p.alpha + 1.0) * p.mu2 * v.f.powf(-p.alpha - 2.0);
        let p_x = p.r * (th.x / v.f - th.f * v.x / (v.f * v.f));
        let mag_p_x = b[0].f * b[0].x + b[1].f * b[1].x;
        let su = u.t + p_x + mag_p_x - g * u.xx - dg * v.x * u.x;

        let diffuse = |q: Jet, c: f64| c * (q.xx / v.f - q.x * v.x / (v.f * v.f));
        let sw = [0, 1].map(|i| w[i].t - b[i].x - diffuse(w[i], p.lambda));
        let sb = [0, 1].map(|i| v.t * b[i].f + v.f * b[i].t - w[i].x - diffuse(b[i], p.nu));

        let kth = p.kappa * th.f.powf(p.beta);
        let dk = if p.beta == 0.0 {
            0.0
        } else {
            p.kappa * p.beta * th.f.powf(p.beta - 1.0)
        };
        let conduction = (dk * th.x * th.x + kth * th.xx - kth * th.x * v.x / v.f) / v.f;
        let heating = (p.mu(v.f) * u.x * u.x
            + p.lambda * (w[0].x * w[0].x + w[1].x * w[1].x)
            + p.nu * (b[0].x * b[0].x + b[1].x * b[1].x))
            / v.f;
        let stheta = p.cv * th.t + p.r * th.f * u.x / v.f - conduction - heating;

        PointSources {
            v: v.t - u.x,
            u: su,
            w: sw,
            b: sb,
            theta: stheta,
        }
    }

    /// Exact end values at time `t` on `grid`.
    pub fn boundary(&self, grid: &Grid, t: f64) -> BoundaryValues {
        let end = |x: f64| EndValues {
            u: self.u(x, t),
            w: self.w(x, t),
            theta: ThetaEnd::Dirichlet(self.theta(x, t)),
            b: self.b(x, t),
        };
        BoundaryValues {
            left: end(grid.left_edge),
            right: end(grid.right_edge()),
        }
    }

    /// The exact solution sampled on `grid` (cells and nodes) at time `t`.
    pub fn sample(&self, grid: Grid, t: f64) -> crate::GasState {
        let centers = grid.center_coords();
        let nodes = grid.node_coords();
        crate::GasState {
            grid,
            v: centers.iter().map(|&x| self.v(x, t)).collect(),
            theta: centers.iter().map(|&x| self.theta(x, t)).collect(),
            b: centers.iter().map(|&x| self.b(x, t)).collect(),
            u: nodes.iter().map(|&x| self.u(x, t)).collect(),
            w: nodes.iter().map(|&x| self.w(x, t)).collect(),
            t,
            step: 0,
        }
    }
}

/// Forcing sampled where the solver needs it: `v`, `b`, `θ` at cell
/// centres, `u`, `w` at nodes.
pub fn mms_sources(sol: &MmsSolution, grid: &Grid, t: f64, p: &PhysicalParams) -> Result<Sources> {
    sol.validate()?;
    let cells: Vec<PointSources> = grid.center_coords().iter().map(|&x| sol.sources_at(x, t, p)).collect();
    let nodes: Vec<PointSources> = grid.node_coords().iter().map(|&x| sol.sources_at(x, t, p)).collect();
    Ok(Sources {
        v: cells.iter().map(|s| s.v).collect(),
        u: nodes.iter().map(|s| s.u).collect(),
        w: nodes.iter().map(|s| s.w).collect(),
        b: cells.iter().map(|s| s.b).collect(),
        theta: cells.iter().map(|s| s.theta).collect(),
    })
}

/// Drives the solver along a manufactured solution: exact end values and
/// forcing at each requested time.
#[derive(Debug, Clone, Copy)]
pub struct MmsDrive {
    pub solution: MmsSolution,
    pub params: PhysicalParams,
    pub grid: Grid,
}

impl MmsDrive {
    pub fn new(solution: MmsSolution, params: PhysicalParams, grid: Grid) -> Result<Self> {
        solution.validate()?;
        Ok(Self {
            solution,
            params,
            grid,
        })
    }
}

impl Drive for MmsDrive {
    fn boundary(&self, t: f64) -> BoundaryValues {
        self.solution.boundary(&self.grid, t)
    }

    fn sources(&self, grid: &Grid, t: f64) -> Option<Sources> {
        mms_sources(&self.solution, grid, t, &self.params).ok()
    }
}
