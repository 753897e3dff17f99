use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    #[error("cannot partition {n} observations into {q} groups")]
    Partition { n: usize, q: usize },

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("degenerate groups: all {q} group statistics are identical")]
    DegenerateGroups { q: usize },

    #[error("degenerate variance: residual variance estimate is zero (perfect fit)")]
    DegenerateVariance,

    #[error("sign instruments of predictors {0} and {1} are collinear; recenter one of them")]
    SignDegeneracy(usize, usize),

    #[error("sign-instrument cross-product matrix is singular")]
    SingularInstruments,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("insufficient data: {found} usable rows, need at least {required}")]
    InsufficientData { found: usize, required: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
