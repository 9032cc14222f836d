use thiserror::Error;

/// Failures that stop a job before any mathematical verdict: exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }
}

impl From<foliage_core::Error> for CliError {
    fn from(e: foliage_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
