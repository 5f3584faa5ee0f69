use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A closed-form coefficient has a vanishing denominator.
    #[error("singular coefficient: denominator {denominator} vanishes (|{denominator}| = {value:e})")]
    SingularCoefficient { denominator: &'static str, value: f64 },

    #[error("fundamental mode resonates with harmonic n = {0}")]
    Resonant(u64),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// The profile leaves the domain of the square-root nonlinearity.
    #[error("nonlinearity domain violated: min eta = {min_eta} <= -1")]
    NonlinearityDomain { min_eta: f64 },

    #[error("Newton iteration failed to converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("lost track of the critical branch after T = {last_tension}")]
    BranchLost { last_tension: f64 },

    #[error("structure violation: {0}")]
    Structure(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Argument(_) => "argument",
            Error::SingularCoefficient { .. } => "singular_coefficient",
            Error::Resonant(_) => "resonant",
            Error::UnsupportedModel(_) => "unsupported_model",
            Error::UnsupportedParameter(_) => "unsupported_parameter",
            Error::NonlinearityDomain { .. } => "nonlinearity_domain",
            Error::Convergence { .. } => "convergence",
            Error::BranchLost { .. } => "branch_lost",
            Error::Structure(_) => "structure",
            Error::Numerical(_) => "numerical",
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::BranchLost { .. }
                | Error::Structure(_)
                | Error::Numerical(_)
        )
    }
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}
