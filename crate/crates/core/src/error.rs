use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// The conditional port law collapses to a point mass when `mu == 1`.
    #[error("degenerate correlation (mu = 1): the conditional density is a point mass")]
    DegenerateCorrelation,

    #[error("series truncation failure: tail bound {tail:.3e} exceeds tolerance {tol:.3e}")]
    TruncationFailure { tail: f64, tol: f64 },

    #[error("term explosion: {terms} terms exceeds the cap of {cap}")]
    TermExplosion { terms: usize, cap: usize },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("quadrature did not converge: estimated error {err:.3e} after {intervals} intervals")]
    QuadratureNonconvergence { err: f64, intervals: usize },

    #[error("oracle starvation: acceptance probability {rate:.3e} below 1e-6")]
    OracleStarvation { rate: f64 },

    #[error("probability {value} outside [0, 1] beyond tolerance ({context})")]
    ProbabilityOutOfRange { value: f64, context: &'static str },
}

impl Error {
    /// Short machine-readable tag, used in result tables.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NumericalInstability(_) => "numerical_instability",
            Error::DegenerateCorrelation => "degenerate_correlation",
            Error::TruncationFailure { .. } => "truncation_failure",
            Error::TermExplosion { .. } => "term_explosion",
            Error::UnsupportedConfiguration(_) => "unsupported_configuration",
            Error::QuadratureNonconvergence { .. } => "quadrature_nonconvergence",
            Error::OracleStarvation { .. } => "oracle_starvation",
            Error::ProbabilityOutOfRange { .. } => "probability_out_of_range",
        }
    }
}

/// Accept a computed probability if it lies in `[-1e-9, 1 + 1e-9]`, snapping
/// the rounding slack back into `[0, 1]`.
pub(crate) fn check_probability(value: f64, context: &'static str) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !value.is_finite() || value < -SLACK || value > 1.0 + SLACK {
        return Err(Error::ProbabilityOutOfRange { value, context });
    }
    Ok(value.clamp(0.0, 1.0))
}
