use thiserror::Error;

use crate::hilbert::Factor;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("occupation {occupation} of mode {mode:?} outside truncation dimension {dim}")]
    OutOfTruncation { mode: Factor, occupation: usize, dim: usize },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("truncation tail violated: {mass:e} probability in the top Fock levels of {context} (limit {limit:e})")]
    TruncationTail { context: String, mass: f64, limit: f64 },

    #[error("partial trace requires a nonempty keep set")]
    EmptyKeep,

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("cat state normalization {0:e} too small")]
    DegenerateCat(f64),

    #[error("mode {0:?} is not in the vacuum state")]
    NotVacuum(Factor),

    #[error("qubit is not in |g>")]
    QubitNotGround,

    #[error("invalid pulse envelope: {0}")]
    InvalidEnvelope(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rate x duration = {0} exceeds the first-order limit 0.1")]
    FirstOrderRegime(f64),

    #[error("invalid fit data: {0}")]
    InvalidData(String),

    #[error("fit did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("{failed} of {replicas} bootstrap replicas failed to converge")]
    BootstrapFailures { failed: usize, replicas: usize },
}
