use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant maps to a short machine-readable code (see [`Error::code`])
/// which the command-line front end prints alongside the message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("the zero polynomial has no Newton polygon")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid finite group: {0}")]
    InvalidGroup(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("subgroup is not contained in the ambient subgroup: {0}")]
    NotContained(String),
    #[error("index is not finite: {0}")]
    InfiniteIndex(String),
    #[error("step-1 did not stabilize within cap {cap}")]
    Step1Cap { cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("scale methods disagree: {0}")]
    ScaleDisagreement(String),
    #[error("element has no diagonal form")]
    MissingDiagonalForm,
    #[error("inconsistent portrait: {0}")]
    InconsistentPortrait(String),
    #[error("subgroup is not tidy: {0}")]
    NotTidy(String),
    #[error("not compact open in the ambient subgroup: {0}")]
    NotCompactOpen(String),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("horizon must be positive")]
    InvalidHorizon,
    #[error("radius too small: {0}")]
    RadiusTooSmall(String),
    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),
}

impl Error {
    /// Stable identifier for scripts.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "E_NOT_PRIME",
            Error::NotSquare { .. } => "E_NOT_SQUARE",
            Error::Singular => "E_SINGULAR",
            Error::ZeroPolynomial => "E_ZERO_POLY",
            Error::Dimension(_) => "E_DIMENSION",
            Error::InvalidGroup(_) => "E_INVALID_GROUP",
            Error::NotSubgroup(_) => "E_NOT_SUBGROUP",
            Error::InvalidInput(_) => "E_INVALID_INPUT",
            Error::Parse(_) => "E_PARSE",
            Error::NotContained(_) => "E_NOT_CONTAINED",
            Error::InfiniteIndex(_) => "E_INFINITE_INDEX",
            Error::Step1Cap { .. } => "E_STEP1_CAP",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::Budget(_) => "E_BUDGET",
            Error::ScaleDisagreement(_) => "E_SCALE_DISAGREEMENT",
            Error::MissingDiagonalForm => "E_NO_DIAGONAL_FORM",
            Error::InconsistentPortrait(_) => "E_PORTRAIT",
            Error::NotTidy(_) => "E_NOT_TIDY",
            Error::NotCompactOpen(_) => "E_NOT_COMPACT_OPEN",
            Error::UnknownCheck(_) => "E_UNKNOWN_CHECK",
            Error::InvalidHorizon => "E_HORIZON",
            Error::RadiusTooSmall(_) => "E_RADIUS",
            Error::EnumerationBound(_) => "E_ENUMERATION_BOUND",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
