use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("massless-mode view undefined: dimensionless variables need omega > 0")]
    MasslessView,

    #[error("massless propagator undefined: omega must be positive")]
    MasslessPropagator,

    #[error("infrared-divergent perturbative reference: one-loop result needs omega > 0")]
    InfraredDivergent,

    #[error("{what} = {value} outside the domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("grid too coarse: {requested} modes requested from {grid} samples (limit {limit})")]
    GridTooCoarse {
        requested: usize,
        grid: usize,
        limit: usize,
    },

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("approximation breakdown at T = {temperature}: Z2 + dZ = {value} <= 0")]
    Breakdown { temperature: f64, value: f64 },

    #[error("no crossing: <S_I> stays below 1 for theta <= {theta_max} (g = {g})")]
    NoCrossing { g: f64, theta_max: f64 },

    #[error("insufficient levels: truncation bound {bound:e} exceeds {limit:e}; raise the basis size")]
    InsufficientLevels { bound: f64, limit: f64 },

    #[error("spectrum not converged: ground-state shift {shift:e} between basis sizes exceeds {tol:e}")]
    SpectrumNotConverged { shift: f64, tol: f64 },
}

impl Error {
    /// True for the failure modes that mark a single point of a curve rather
    /// than a broken computation.
    pub fn is_breakdown(&self) -> bool {
        matches!(self, Error::Breakdown { .. })
    }
}
