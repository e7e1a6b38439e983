use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] morrey_core::Error),

    /// The experiment ran but its pass criterion failed.
    #[error("verdict failed: {0}")]
    Verdict(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn param(name: &str, reason: impl Into<String>) -> Self {
        CliError::Core(morrey_core::Error::param(name, reason))
    }

    pub fn exit_code(&self) -> ExitCode {
        use morrey_core::Error as E;
        ExitCode::from(match self {
            CliError::Core(E::Parameter { .. }) => 2,
            CliError::Core(E::Data(_) | E::Domain(_) | E::Io(_)) => 3,
            CliError::Verdict(_) => 4,
        })
    }
}

/// Config errors: unknown or ill-typed keys are parameter errors, anything
/// that is not JSON at all is a data error.
pub fn config_error(path: &std::path::Path, e: serde_json::Error) -> CliError {
    use serde_json::error::Category;
    let msg = format!("{}: {e}", path.display());
    match e.classify() {
        Category::Data => CliError::param("config", msg),
        Category::Io | Category::Syntax | Category::Eof => CliError::Core(morrey_core::Error::data(msg)),
    }
}
