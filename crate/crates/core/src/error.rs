//! Error type shared across the crate.
//!
//! Every variant carries a stable machine-readable code; the CLI prints
//! `error[<code>] <message>` on failure.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid query spec: {0}")]
    InvalidSpec(String),

    #[error("invalid classification symbol {0:?}")]
    InvalidSymbol(String),

    #[error("class {0:?} is not in the canonical class list")]
    UnknownClass(String),

    #[error("{0}")]
    Format(String),

    #[error("similarity value {value} out of [0,1] at row {row}, column {col}")]
    Range { value: f64, row: usize, col: usize },

    #[error("set name {0:?} already exists in the store")]
    NameConflict(String),

    #[error("classification level mismatch: store is {store}, column is {column}")]
    LevelConflict { store: String, column: String },

    #[error("invalid set name {0:?}: must be 1..=10 characters")]
    InvalidName(String),

    #[error("portfolio {0:?} has no class counts")]
    EmptyPortfolio(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("cosine undefined: vector {0:?} has zero norm")]
    UndefinedCosine(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("graph too small: {0}")]
    DegenerateGraph(String),

    #[error("unknown set name {name:?}; valid names: {valid:?}")]
    UnknownName { name: String, valid: Vec<String> },

    #[error("store is locked by another run ({0})")]
    StoreLocked(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable code used as the CLI error prefix.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse-error",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::InvalidSymbol(_) => "invalid-symbol",
            Error::UnknownClass(_) => "unknown-class",
            Error::Format(_) => "format-error",
            Error::Range { .. } => "range-error",
            Error::NameConflict(_) => "name-conflict",
            Error::LevelConflict { .. } => "level-conflict",
            Error::InvalidName(_) => "invalid-name",
            Error::EmptyPortfolio(_) => "empty-portfolio",
            Error::UndefinedCorrelation(_) => "undefined-correlation",
            Error::UndefinedCosine(_) => "undefined-cosine",
            Error::Shape(_) => "shape-error",
            Error::DegenerateGraph(_) => "degenerate-graph",
            Error::UnknownName { .. } => "unknown-name",
            Error::StoreLocked(_) => "store-locked",
            Error::Io(_) => "io-error",
        }
    }
}
