use thiserror::Error;

/// Errors raised by the solvers, generators and file readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no element of the set is >= {0}")]
    NoElementAbove(f64),
    #[error("no element of the set is <= {0}")]
    NoElementBelow(f64),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("density condition violated: {0}")]
    DensityViolation(String),
    #[error("could not bracket the window offset: {0}")]
    BracketFailure(String),
    #[error("transversal extraction failed at index {index}: {detail}")]
    ExtractionFailure { index: usize, detail: String },
    #[error("no feasible window offset: {0}")]
    Infeasible(String),
    #[error("enumeration needs {needed} tuples, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("set is empty")]
    EmptySet,
    #[error("point {index} is not a member of its set: {detail}")]
    MembershipViolation { index: usize, detail: String },
    #[error("primitive cannot be represented: {0}")]
    UnsupportedPrimitive(String),
    #[error("sequence carries no component labels at index {0}")]
    UnlabeledSequence(usize),
    #[error("pattern is infeasible at index {index}: {detail}")]
    InfeasiblePattern { index: usize, detail: String },
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error object.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoElementAbove(_) => "NoElementAbove",
            Error::NoElementBelow(_) => "NoElementBelow",
            Error::Validation(_) => "ValidationError",
            Error::DensityViolation(_) => "DensityViolation",
            Error::BracketFailure(_) => "BracketFailure",
            Error::ExtractionFailure { .. } => "ExtractionFailure",
            Error::Infeasible(_) => "Infeasible",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::EmptySet => "EmptySet",
            Error::MembershipViolation { .. } => "MembershipViolation",
            Error::UnsupportedPrimitive(_) => "UnsupportedPrimitive",
            Error::UnlabeledSequence(_) => "UnlabeledSequence",
            Error::InfeasiblePattern { .. } => "InfeasiblePattern",
            Error::Parse(_) => "ParseError",
        }
    }

    /// Errors caused by bad user input rather than an internal inconsistency.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::ExtractionFailure { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
