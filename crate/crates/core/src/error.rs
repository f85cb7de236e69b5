use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in `{0}`")]
    NonFinite(&'static str),

    #[error("dynamics matrix is not Hurwitz (largest eigenvalue real part {max_real_part:e})")]
    NonHurwitz { max_real_part: f64 },

    #[error("Gramian is singular or not positive definite (lambda_min {lambda_min:e}, lambda_max {lambda_max:e})")]
    SingularGramian { lambda_min: f64, lambda_max: f64 },

    #[error("adaptive quadrature did not converge within {panels} panels")]
    QuadratureNonConvergence { panels: usize },

    #[error("linear system is singular: {0}")]
    SingularSystem(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for input-validation failures as opposed to numerical breakdowns.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::DimensionMismatch(_) | Error::NonFinite(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
