use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Unreadable or corrupt input data (map, spectrum, line list).
    #[error("{path}: {source}")]
    Data {
        path: PathBuf,
        #[source]
        source: nlinterf::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Incompatible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Data { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Incompatible(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn data(path: impl Into<PathBuf>) -> impl FnOnce(nlinterf::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Data { path, source }
    }

    /// Sorts a library error raised while computing: bad parameters are
    /// configuration errors, data that does not fit together is an
    /// incompatibility.
    pub fn compute(context: &str) -> impl FnOnce(nlinterf::Error) -> CliError + '_ {
        move |e| {
            use nlinterf::Error as E;
            match e {
                E::InvalidInput(_) | E::OutOfRange { .. } | E::Coefficients(_) => {
                    CliError::Config(format!("{context}: {e}"))
                }
                E::Io(source) => CliError::Io { path: PathBuf::from(context), source },
                other => CliError::Incompatible(format!("{context}: {other}")),
            }
        }
    }
}
