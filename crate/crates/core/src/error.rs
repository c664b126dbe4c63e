use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// The residue field is too small to hold all roots of `poly`.
    #[error("polynomial {poly} does not split into linear factors over {field}")]
    NonSplitting { poly: String, field: String },

    #[error("zero has no valuation")]
    ZeroHasNoValuation,

    #[error("zero polynomial has no Newton polygon")]
    ZeroPolynomial,

    #[error("polynomial vanishes identically after substitution")]
    ZeroAfterSubstitution,

    #[error("specialization value {value} for u{var} does not have valuation 0")]
    InvalidSpecialization { var: usize, value: String },

    #[error("root {root} is exact; the polynomial vanishes identically on it")]
    ExactRootSubstitution { root: String },

    #[error("expansion recursion exceeded depth {depth}")]
    RecursionLimit { depth: usize },

    #[error("{w} is not a tropical point of {poly}")]
    InvalidTarget { w: String, poly: String },

    #[error("not a triangular set: polynomial {index}: {reason}")]
    NonTriangularInput { index: usize, reason: String },

    #[error("precision {requested} would exceed the limit {limit}")]
    PrecisionLimitExceeded { requested: String, limit: String },

    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },

    #[error("reserved identifier {name} at line {line}, column {col}")]
    ReservedIdentifier { name: String, line: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("on branch {branch}: {source}")]
    OnBranch { branch: String, source: Box<Error> },
}

impl Error {
    /// Strips branch context and returns the underlying error.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::OnBranch { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
