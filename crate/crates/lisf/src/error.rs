use std::path::PathBuf;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] lisf_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit status: 3 for I/O, 4 for bad input or configuration,
    /// 5 for numerical failures. Usage errors exit with 2 from the
    /// argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Parse { .. } | CliError::Config(_) => 4,
            CliError::Model(e) if e.is_numerical() => 5,
            CliError::Model(_) => 4,
        }
    }
}
