use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed number `{0}`")]
    Number(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid packing: {0}")]
    InvalidPacking(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("instance has {n} items, limit is {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("certificate enumeration needs {needed} vectors, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("configuration enumeration exceeded cap of {cap}")]
    ConfigCapExceeded { cap: usize },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("beta = {beta} is out of range 0..={max}")]
    BetaOutOfRange { beta: usize, max: usize },

    #[error("pricing grid too large: {0}")]
    GridOverflow(String),

    #[error("linear program: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, Error>;
