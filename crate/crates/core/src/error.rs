use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A pointwise law was evaluated outside its domain (nonpositive v or θ).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid initial profile: {0}")]
    InvalidProfile(String),

    #[error("invalid step control: {0}")]
    InvalidControl(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "positivity failure at t = {t:.6e} (dt = {dt:.3e}): min v = {min_v:.6e}, min theta = {min_theta:.6e}"
    )]
    PositivityFailure {
        t: f64,
        dt: f64,
        min_v: f64,
        min_theta: f64,
    },

    #[error(
        "temperature Newton solve diverged at t = {t:.6e} (dt = {dt:.3e}): residual {residual:.3e}, min v = {min_v:.6e}, min theta = {min_theta:.6e}"
    )]
    NewtonDivergence {
        t: f64,
        dt: f64,
        residual: f64,
        min_v: f64,
        min_theta: f64,
    },

    /// The representation-formula diagnostic only exists for the
    /// normalized constant preset.
    #[error("representation formula requires the normalized preset")]
    NotNormalized,

    #[error("singular tridiagonal system (pivot {pivot:.3e} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("{0}")]
    Study(String),
}

impl Error {
    /// True for the two stepping failures the driver reports with exit code 3.
    pub fn is_step_failure(&self) -> bool {
        matches!(
            self,
            Error::PositivityFailure { .. } | Error::NewtonDivergence { .. }
        )
    }
}
