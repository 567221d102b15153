use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Schema(String),
    #[error("invalid parameter: {0}")]
    Invalid(#[source] gravlab_core::Error),
    #[error("table has {expected} columns but row has {actual}")]
    RaggedRow { expected: usize, actual: usize },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
    #[error("computation failed: {0}")]
    Runtime(#[from] gravlab_core::Error),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    /// 1 for bad input, 2 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ReadConfig { .. }
            | CliError::Parse { .. }
            | CliError::Schema(_)
            | CliError::Invalid(_) => 1,
            CliError::RaggedRow { .. }
            | CliError::Write { .. }
            | CliError::Serialize(_)
            | CliError::Runtime(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
