use thiserror::Error;

use crate::basis::BasisId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ink parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("symbol {symbol}: stroke {stroke} has {points} point(s), at least 2 are required")]
    ShortStroke {
        symbol: usize,
        stroke: usize,
        points: usize,
    },

    #[error("symbol {symbol}: no strokes")]
    EmptySymbol { symbol: usize },

    #[error("symbol {symbol}: stroke {stroke}, point {point} has a non-finite coordinate")]
    NonFinite {
        symbol: usize,
        stroke: usize,
        point: usize,
    },

    #[error("degenerate trace: all points coincide")]
    DegenerateTrace,

    #[error("degenerate symbol: zero shape vector after centering")]
    DegenerateSymbol,

    #[error("invalid basis configuration: {0}")]
    Config(String),

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: BasisId, found: BasisId },

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported catalog version {0}")]
    CatalogVersion(u32),

    #[error("catalog basis (degree {degree}, mu {mu}) is not supported")]
    UnknownBasis { degree: usize, mu: f64 },

    #[error("duplicate class id `{0}` in catalog")]
    DuplicateClass(String),

    #[error("catalog model `{class_id}`: {message}")]
    InvalidModel { class_id: String, message: String },

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(err: &serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    /// True for errors caused by bad input or configuration, as opposed to
    /// processing or I/O failures.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_) | Error::DegenerateSymbol)
    }
}
