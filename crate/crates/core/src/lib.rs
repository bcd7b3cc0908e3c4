//! One-dimensional Lagrangian simulator for planar compressible
//! magnetohydrodynamics with volume-dependent viscosity and
//! temperature-degenerate heat conductivity.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`], [`grid`], [`boundary`], [`state`], [`profile`] hold the
//!   domain types and initial-data construction.
//! * [`constitutive`] evaluates the pointwise material laws.
//! * [`solver`] advances a [`GasState`] with the positivity-guarded
//!   semi-implicit splitting scheme.
//! * [`diagnostics`] evaluates the energy–entropy functional, the
//!   dissipation rate, slab and level-set bounds, and the representation
//!   formula for the specific volume.
//! * [`verification`] provides independent oracles: manufactured
//!   solutions, an explicit RK4 reference integrator and convergence
//!   studies.

pub mod boundary;
pub mod constitutive;
pub mod diagnostics;
mod error;
pub mod grid;
pub mod params;
pub mod profile;
pub mod solver;
pub mod state;
pub(crate) mod stencil;
pub mod tridiag;
pub mod util;
pub mod verification;

pub use boundary::{BoundaryCondition, BoundaryValues, EndValues, ThetaEnd};
pub use error::{Error, Result};
pub use grid::Grid;
pub use params::PhysicalParams;
pub use profile::{make_initial_state, GaussianBump, InitialProfile, RandomBumps};
pub use solver::{compute_dt, run_until, step, StepControl, StepReport};
pub use state::GasState;
