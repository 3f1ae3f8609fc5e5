use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("could not parse input: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("requirement of {r0} b/s/Hz is not reachable: {reason}")]
    Infeasible { r0: f64, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
