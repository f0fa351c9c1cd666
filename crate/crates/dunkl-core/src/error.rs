//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, evaluation, and integration routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A preset/dimension/multiplicity combination that cannot be realized.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested evaluation is not supported by the chosen kernel mode.
    #[error("capability error: {0}")]
    Capability(String),

    /// The evaluation point lies beyond the accuracy envelope of a plan.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// An integrand returned a non-finite value; the offending node is named.
    #[error("evaluation error: non-finite integrand at node {node:?}")]
    Evaluation { node: Vec<f64> },

    /// A power integral with a divergent exponent configuration.
    #[error("divergence error: {0}")]
    Divergence(String),

    /// The linear system behind an atom construction could not be solved.
    #[error("construction error: {0}")]
    Construction(String),

    /// A constructed atom failed its independent re-certification.
    #[error("certification error: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
