use thiserror::Error;

/// Harness errors carrying a machine-parsable category.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("error:config: {0}")]
    Config(String),
    #[error("error:io: {0}")]
    Io(String),
    #[error("error:run: {0}")]
    Run(String),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        HarnessError::Io(msg.into())
    }

    pub fn run(msg: impl Into<String>) -> Self {
        HarnessError::Run(msg.into())
    }

    pub fn category(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config",
            HarnessError::Io(_) => "io",
            HarnessError::Run(_) => "run",
        }
    }
}

impl From<osemo::CoreError> for HarnessError {
    fn from(e: osemo::CoreError) -> Self {
        HarnessError::Run(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
