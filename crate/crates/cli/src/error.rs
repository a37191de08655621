use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] ddwave::Error),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ddwave::Error as E;
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Model(e) => match e {
                E::InvalidParams(_)
                | E::VelocityOutOfRange { .. }
                | E::DegenerateVelocity
                | E::InvalidGrid(_)
                | E::NotApplicable(_)
                | E::InvalidConfig(_) => 2,
                E::TailTooFat { .. } => 3,
                E::StepRejected { .. } => 4,
                _ => 1,
            },
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
