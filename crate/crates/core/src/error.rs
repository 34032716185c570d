use std::path::PathBuf;

/// Error type shared by the whole pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is out of range or malformed.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input data violates a contract (label counts, shapes, empty sets).
    #[error("invalid data: {0}")]
    Data(String),

    /// A binary or text file does not match its expected format.
    #[error("format error in {path}: {reason} (byte offset {offset})")]
    Format {
        path: PathBuf,
        reason: String,
        offset: u64,
    },

    /// Stimulus script violates the simulator's state machine.
    #[error("script error at line {line}: {reason}")]
    Script { line: usize, reason: String },

    /// Training diverged (non-finite loss).
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Training { epoch: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code convention: 1 for configuration/parameter
    /// problems, 2 for data and format problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Script { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
