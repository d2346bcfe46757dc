use std::fmt;

/// Errors produced anywhere in the compile/explain pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ordering violation: node on variable {var} has a child on variable {child_var}")]
    Ordering { var: usize, child_var: usize },

    #[error("arity mismatch on variable {var}: expected {expected} children, got {got}")]
    Arity {
        var: usize,
        expected: usize,
        got: usize,
    },

    #[error("value {value} out of domain for variable {var} (domain size {size})")]
    Domain {
        var: usize,
        value: usize,
        size: usize,
    },

    #[error("instance has {got} values but {expected} variables are declared")]
    Length { expected: usize, got: usize },

    #[error("variable index {0} is not declared")]
    UnknownVariable(usize),

    #[error("diagram belongs to a different manager")]
    ForeignDiagram,

    #[error("operation not supported in {0} mode")]
    Mode(&'static str),

    #[error("posterior undefined: the instance has zero probability")]
    UndefinedPosterior,

    #[error("value out of range: {0}")]
    Range(String),

    #[error("capacity exceeded: {required} entries requested, cap is {cap}")]
    Capacity { required: u128, cap: u128 },

    #[error("training failed: {0}")]
    Training(String),

    #[error("sequencing error: {0}")]
    Sequencing(String),

    #[error("malformed structure: {0}")]
    Structure(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{0}")]
    Parse(ParseError),

    #[error("CPT row {row} sums to {sum}, expected 1")]
    Normalization { row: String, sum: f64 },

    #[error("verification mismatch: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Location-tagged parse failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: {}",
            self.line, self.column, self.message
        )
    }
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse(ParseError {
            line,
            column,
            message: message.into(),
        })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
