use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index sum n+k = {sum} exceeds the supported limit {limit}")]
    IndexLimit { sum: usize, limit: usize },

    #[error("eigensolver did not converge (off-diagonal residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("denominator {value:e} at {coord} is below tolerance {tol:e}")]
    DenominatorNearZero { coord: f64, value: f64, tol: f64 },

    #[error("quadrature tolerance not reached: estimate {estimate:e}, error {error:e}")]
    QuadratureTolerance { estimate: f64, error: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
