use std::path::Path;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] cvtele::Error),
}

#[derive(Serialize)]
struct Report<'a> {
    category: &'a str,
    message: String,
}

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    pub fn missing(section: &str) -> Self {
        CliError::Schema(format!("config has no `{section}` section"))
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Schema(_) => "schema",
            CliError::Model(e) => e.category(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 3,
            CliError::Schema(_) => 4,
            CliError::Model(_) => 5,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let report = Report {
            category: self.category(),
            message: self.to_string(),
        };
        serde_json::to_string(&serde_json::json!({ "error": report })).expect("serializable")
    }
}
