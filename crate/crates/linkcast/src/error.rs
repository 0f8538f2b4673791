use std::path::PathBuf;

/// Failures surfaced by the command line, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("fingerprint mismatch: {left} vs {right}")]
    FingerprintMismatch { left: String, right: String },
    #[error("{0}")]
    NotEvaluable(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] linkcast_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INGESTION: i32 = 3;
pub const EXIT_CONTRACT: i32 = 4;
pub const EXIT_EVALUABILITY: i32 = 5;

impl Error {
    pub fn exit_code(&self) -> i32 {
        use linkcast_core::Error as C;
        match self {
            Error::Read { .. }
            | Error::Parse { .. }
            | Error::Format { .. }
            | Error::FingerprintMismatch { .. } => EXIT_INGESTION,
            Error::NotEvaluable(_) => EXIT_EVALUABILITY,
            Error::Write { .. } | Error::Usage(_) => EXIT_OTHER,
            Error::Core(e) => match e {
                C::EmptyGraph | C::NegativeTimestamp { .. } | C::NodeOutOfRange { .. } => {
                    EXIT_INGESTION
                }
                C::ContractViolation(_) | C::ReplayMismatch { .. } => EXIT_CONTRACT,
                C::EmptyTrain { .. }
                | C::EmptyTest
                | C::EmptyLabels
                | C::MetricUndefined(_)
                | C::UniverseTooSmall { .. }
                | C::UniverseExhausted { .. } => EXIT_EVALUABILITY,
                _ => EXIT_OTHER,
            },
        }
    }
}
