use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("model validation failed: {0}")]
    Validation(String),

    #[error("policy is missing an action for a reachable cluster (agent {agent}, stage {stage})")]
    MissingAction { agent: usize, stage: usize },

    #[error("per-stage budget too small: L = {l} but stage {stage} needs at least {needed} (n * clusters)")]
    BudgetExceeded { l: u64, stage: usize, needed: u64 },

    #[error("search hit the {0} limit before finding any complete policy")]
    LimitWithoutPolicy(String),

    #[error("brute-force guard exceeded: ~{0:.3e} joint policies")]
    GuardExceeded(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
