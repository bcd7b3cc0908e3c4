//! Independent checks of the solver: manufactured solutions with their
//! forcing terms, an explicit RK4 integrator of the same semi-discrete
//! system, the exact discrete-Fourier solution of the linear heat problem,
//! and convergence-order studies.

mod convergence;
mod mms;
mod reference;

pub use convergence::{
    max_field_difference,
    convergence_study, temporal_study, ConvergenceProblem, ConvergenceReport, Field, LevelResult,
    TimeCoupling,
};
pub use mms::{mms_sources, MmsDrive, MmsSolution, PointSources};
pub use reference::{
    explicit_reference, explicit_reference_driven, heat_fourier_solution, stable_reference_dt, MAX_REFERENCE_CELLS,
};
