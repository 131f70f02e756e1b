use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("comparison matrix is reducible: ratings are not identifiable")]
    Reducible,

    #[error("undefeated item {item:?}: column-stochastic normalization undefined")]
    Undefeated { item: String },

    #[error("item {item:?} has played no matches")]
    NoMatches { item: String },

    #[error("cannot remove item {item:?}: it has no losses")]
    NoLosses { item: String },

    #[error("matrix is not quasi-symmetric (achieved residual {residual:e})")]
    NotQuasiSymmetric { residual: f64 },

    #[error("resultant vector is zero: direction undefined")]
    ZeroResultant,

    #[error("simulation exceeded {limit} rounds without a winner")]
    RoundLimit { limit: u64 },

    #[error("{method}: {source}")]
    Method {
        method: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True when the input was well formed but an algorithm's precondition
    /// does not hold for it (reducibility, undefeated items and the like).
    pub fn is_precondition(&self) -> bool {
        match self {
            Error::Reducible
            | Error::Undefeated { .. }
            | Error::NoMatches { .. }
            | Error::NoLosses { .. }
            | Error::NotQuasiSymmetric { .. }
            | Error::ZeroResultant
            | Error::RoundLimit { .. } => true,
            Error::Method { source, .. } => source.is_precondition(),
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } => false,
        }
    }
}
