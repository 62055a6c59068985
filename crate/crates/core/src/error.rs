use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("value outside the domain of the map: {0}")]
    Domain(String),

    #[error("no boundary crossing found before s_max = {s_max}")]
    NoZeroFound { s_max: f64 },

    #[error("solution approached the singular value U = 1 at s = {s} (U = {u})")]
    SingularityHit { s: f64, u: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("maximum number of integrator steps ({steps}) exceeded at t = {t}")]
    MaxSteps { steps: usize, t: f64 },

    #[error("curve maximum sits at the sampling boundary (alpha = {alpha})")]
    FoldNotInterior { alpha: f64 },

    #[error("initial data outside the trapping region: E = {energy}")]
    InitialDataOutsideOmega { energy: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("sufficient condition infeasible: min h(m) = {min_h} >= 1")]
    Infeasible { min_h: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last distance {distance})")]
    NonConvergence { iterations: usize, distance: f64 },

    #[error("lambda too large: max rho^(N-2) v(rho) = {max} does not exceed {target}")]
    LambdaTooLarge { max: f64, target: f64 },

    #[error("inward shot blew up at r = {r}")]
    Blowup { r: f64 },
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::Domain(_) => "Domain",
            Error::NoZeroFound { .. } => "NoZeroFound",
            Error::SingularityHit { .. } => "SingularityHit",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::MaxSteps { .. } => "MaxSteps",
            Error::FoldNotInterior { .. } => "FoldNotInterior",
            Error::InitialDataOutsideOmega { .. } => "InitialDataOutsideOmega",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::Infeasible { .. } => "Infeasible",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::LambdaTooLarge { .. } => "LambdaTooLarge",
            Error::Blowup { .. } => "Blowup",
        }
    }

    /// Whether the error is a validation failure (as opposed to a numerical one).
    /// Initial data outside the trapping region is a property of the input, so it counts.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::Domain(_)
                | Error::PreconditionViolated(_)
                | Error::InitialDataOutsideOmega { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
