use thiserror::Error;
use xprod_core::{AlgebraError, CastleError, ComparisonError, StructureError, WitnessError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Json { path: String, line: usize, column: usize, message: String },
    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Castle(#[from] CastleError),
}

impl CliError {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse { field: field.into(), message: message.into() }
    }

    pub(crate) fn json(path: &str, e: serde_json::Error) -> Self {
        CliError::Json { path: path.to_string(), line: e.line(), column: e.column(), message: e.to_string() }
    }
}
