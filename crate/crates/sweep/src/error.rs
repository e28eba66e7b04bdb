use thiserror::Error;

/// Failures of the sweep layer, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fbl_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("all {0} sweep points failed")]
    AllRowsFailed(usize),
    #[error("validation failed")]
    ValidationFailed,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl SweepError {
    pub const EXIT_USAGE: i32 = 1;
    pub const EXIT_NUMERIC: i32 = 2;
    pub const EXIT_VALIDATION: i32 = 3;
    pub const EXIT_IO: i32 = 4;

    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Usage(_) | SweepError::Config(_) => Self::EXIT_USAGE,
            SweepError::Core(e) if e.is_numeric() => Self::EXIT_NUMERIC,
            SweepError::Core(_) => Self::EXIT_USAGE,
            SweepError::AllRowsFailed(_) => Self::EXIT_NUMERIC,
            SweepError::ValidationFailed => Self::EXIT_VALIDATION,
            SweepError::Io(_) => Self::EXIT_IO,
            SweepError::Csv(_) => Self::EXIT_IO,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> SweepError {
    SweepError::Usage(msg.into())
}

pub type Result<T, E = SweepError> = std::result::Result<T, E>;
