use snod_core::{Error as CoreError, Regime};

/// Failure of a laboratory run, mapped onto the process exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("regime mismatch: {0}")]
    Regime(Regime),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    /// 2 configuration, 3 numerical failure, 4 regime mismatch, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Regime(_) => 4,
            LabError::Io(_) | LabError::Csv(_) | LabError::Json(_) => 1,
        }
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::InvalidConfig(_) => {
                LabError::Config(e.to_string())
            }
            CoreError::RegimeMismatch { regime } => LabError::Regime(regime),
            other => LabError::Numerical(other),
        }
    }
}
