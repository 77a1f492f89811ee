use thiserror::Error;

/// Errors produced by the estimator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or estimator configuration violates one of its bounds.
    #[error("invalid configuration: {0}")]
    Invalid(String),

    /// A function evaluated to NaN or infinity at a quadrature node.
    #[error("non-finite value {value} of the integrand at node t = {node}")]
    NonFiniteIntegrand { node: f64, value: f64 },

    /// A coefficient summand was NaN or infinite.
    #[error("non-finite summand {value} at observation index {index} (coefficient {coefficient})")]
    NonFiniteSummand {
        index: usize,
        coefficient: usize,
        value: f64,
    },

    /// Not enough observations for the requested estimator.
    #[error("sample size {n} too small: {reason}")]
    SampleTooSmall { n: usize, reason: &'static str },

    /// Name is not in the test-function catalog.
    #[error("unknown test function `{name}`; catalog: {catalog}")]
    UnknownFunction { name: String, catalog: String },

    /// Both exact samplers rejected the covariance sequence.
    #[error("covariance is not positive definite (n = {n}): {detail}")]
    NotPositiveDefinite { n: usize, detail: String },

    /// A Monte Carlo replication failed.
    #[error("replication {replication} at n = {n} failed: {source}")]
    Replication {
        n: usize,
        replication: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
