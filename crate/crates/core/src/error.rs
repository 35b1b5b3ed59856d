use crate::fixed_point::IterationTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid network model: {0}")]
    InvalidModel(String),

    #[error("invalid load vector: {0}")]
    InvalidLoad(String),

    #[error("exponent {exponent} nats exceeds the overflow cap {cap}")]
    Overflow { exponent: f64, cap: f64 },

    #[error("order {permutation:?} needs power {power} below the SIC order's {noma_power}")]
    OrderOptimalityViolated {
        permutation: Vec<usize>,
        power: f64,
        noma_power: f64,
    },

    #[error("{n} users exceed the enumeration cap of {cap}")]
    TooManyUsers { n: usize, cap: usize },

    #[error("invalid grouping policy: {0}")]
    InvalidPolicy(String),

    #[error("no convergence after {} iterations (last delta {:e})", .trace.iterations(), .trace.last_delta())]
    NotConverged { trace: Box<IterationTrace> },

    #[error("interference function property violated: {0}")]
    SifViolation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("verification failed: {0}")]
    VerifyFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
