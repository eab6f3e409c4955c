use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("variable error: {0}")]
    Variable(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("row index {index} out of range 1..={rows}")]
    Index { index: usize, rows: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("resource limit exceeded: {what} (limit {limit})")]
    ResourceLimit { what: String, limit: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
