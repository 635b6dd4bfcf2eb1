use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid spectral grid: {0}")]
    InvalidGrid(String),
    #[error("ring linewidth under-resolved: {points:.2} grid points across the FWHM, need at least {required}")]
    UnderResolved { points: f64, required: f64 },
    #[error("zero state: {0}")]
    ZeroState(String),
    #[error("rail count mismatch: expected {expected}, found {found}")]
    RailMismatch { expected: usize, found: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("no contributions with signal on rail {signal} and idler on rail {idler}")]
    EmptyPort { signal: usize, idler: usize },
    #[error("input not normalized: {0}")]
    NotNormalized(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from the model producing an unusable state
    /// (as opposed to a malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroState(_)
                | Error::Numerical(_)
                | Error::NotNormalized(_)
                | Error::EmptyPort { .. }
        )
    }
}
