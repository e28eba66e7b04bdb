use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure classes shared by every module. Numeric payloads are widened to
/// `f64` so the type stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The path-loss exponent lies outside the unbounded model (alpha > 2).
    #[error("model domain error: {0}")]
    ModelDomain(String),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    /// Tolerance not reached. `best` is the estimate at the point of giving up.
    #[error("no convergence after {evaluations} evaluations (best {best}, error estimate {error_estimate})")]
    Convergence {
        best: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("root bracket could not be established: {0}")]
    RootBracket(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
}

impl Error {
    /// Short machine-readable class name, used by sweep error logs.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::ModelDomain(_) => "model_domain",
            Error::ScenarioMismatch(_) => "scenario_mismatch",
            Error::Convergence { .. } => "convergence",
            Error::RootBracket(_) => "root_bracket",
            Error::UndefinedMetric(_) => "undefined_metric",
        }
    }

    /// True for failures of a numeric procedure, as opposed to bad inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::RootBracket(_))
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
