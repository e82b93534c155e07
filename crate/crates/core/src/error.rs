// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator terms change the particle number by different amounts ({0} vs {1})")]
    MixedParticleChange(i64, i64),
    #[error("mode index {mode} out of range 1..={modes}")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("invalid bipartition: m = {m} with M = {modes} (need 1 <= m < M)")]
    InvalidBipartition { m: usize, modes: usize },
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("polynomial maps the vacuum to the zero vector")]
    EmptyState,
    #[error("diagonal-class constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("positivity violated: minimum eigenvalue {0:e}")]
    PositivityViolation(f64),
    #[error("R block ({k}, {l}) has eigenvalue {value:e} below tolerance")]
    NegativeEigenvalueInR { k: usize, l: usize, value: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("asymptotic validity gate failed: {0}")]
    ValidityGateFailed(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
