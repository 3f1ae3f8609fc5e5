use thiserror::Error;

/// Process exit codes. Stable: scripts depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Ok = 0,
    Parse = 2,
    Numeric = 3,
    Infeasible = 4,
    Validation = 5,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] densenet::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => ExitStatus::Parse,
            CliError::Model(e) => model_status(e),
        }
    }
}

pub fn model_status(e: &densenet::Error) -> ExitStatus {
    use densenet::Error as E;
    match e {
        E::Parse(_) | E::InvalidScenario(_) | E::Precondition(_) => ExitStatus::Parse,
        E::Numerics(_) => ExitStatus::Numeric,
        E::Infeasible { .. } => ExitStatus::Infeasible,
    }
}
