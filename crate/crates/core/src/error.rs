use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    /// A belief update produced NaN or an infinity.
    #[error("arithmetic fault: log-belief became {value} ({context})")]
    NonFinite { value: f64, context: &'static str },

    #[error("run {run_index}: {source}")]
    Run {
        run_index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("enumeration depth {depth} exceeds the limit of {limit}")]
    EnumerationTooDeep { depth: usize, limit: usize },

    #[error(
        "quadrature did not converge: estimated error {estimate:e} above requested {requested:e}"
    )]
    Quadrature { estimate: f64, requested: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    /// True for faults raised by the belief arithmetic, possibly wrapped in a run context.
    pub fn is_arithmetic(&self) -> bool {
        match self {
            Error::NonFinite { .. } => true,
            Error::Run { source, .. } => source.is_arithmetic(),
            _ => false,
        }
    }
}
