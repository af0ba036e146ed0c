use serde::Serialize;
use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("missing required field '{0}'")]
    Missing(String),

    #[error("invalid value '{value}' for field '{key}': {reason}")]
    Invalid { key: String, value: String, reason: String },

    #[error(transparent)]
    Numerical(#[from] twistchain::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Output(String),

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn missing(key: &str) -> Self {
        CliError::Missing(key.to_string())
    }

    pub fn invalid(key: &str, value: &str, reason: &str) -> Self {
        CliError::Invalid {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) | CliError::Missing(_) | CliError::Invalid { .. } => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } | CliError::Output(_) => "io",
            CliError::ChecksFailed { .. } => "check",
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Missing(k) | CliError::Invalid { key: k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }

    pub fn record(&self, command: Option<&str>) -> ErrorRecord {
        ErrorRecord {
            schema_version: crate::record::SCHEMA_VERSION,
            status: "error",
            command: command.map(str::to_string),
            kind: self.kind(),
            field: self.field().map(str::to_string),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub schema_version: u32,
    pub status: &'static str,
    pub command: Option<String>,
    pub kind: &'static str,
    pub field: Option<String>,
    pub message: String,
    pub exit_code: i32,
}
