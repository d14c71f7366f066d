use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent scenario file.
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Analysis(#[from] bubblelab_core::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    /// The run finished but its own consistency checks failed.
    #[error("checks failed: {0}")]
    Checks(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
