use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("schema mismatch in {path}: {message}")]
    Schema { path: String, message: String },

    #[error("model assumption violated ({assumption}): {source}")]
    Assumption { assumption: &'static str, source: persuade_core::Error },

    #[error(transparent)]
    Model(persuade_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for config and schema problems, 3 for model-assumption violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Schema { .. } => 2,
            CliError::Assumption { .. } => 3,
            CliError::Model(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { location: location.into(), message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<persuade_core::Error> for CliError {
    fn from(e: persuade_core::Error) -> Self {
        match e.assumption() {
            Some(assumption) => CliError::Assumption { assumption, source: e },
            None => CliError::Model(e),
        }
    }
}
