use thiserror::Error;

/// Errors raised while validating parameters or evaluating formulas.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scheme parameters: {0}")]
    Params(String),

    #[error("node id {index} out of range 1..={n}")]
    NodeId { index: usize, n: usize },

    #[error("malformed pairing table: {0}")]
    Table(String),

    #[error("gamma {0} outside the allowed range")]
    Gamma(f64),

    #[error("restriction to gamma = {gamma} keeps no node out of {n}")]
    EmptyView { gamma: f64, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid experiment plan: {0}")]
    Plan(String),

    #[error("invalid deployment schedule: {0}")]
    Schedule(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
