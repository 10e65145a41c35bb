use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    #[error("malformed document: {0}")]
    Document(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
