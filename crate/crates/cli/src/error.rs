use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: file not found", .0.display())]
    MissingFile(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed JSON or a document that does not fit the stack schema.
    #[error("{}: {field}: {message}", path.display())]
    Schema {
        path: PathBuf,
        field: String,
        message: String,
    },

    /// Well-formed input whose values break a physical or structural rule.
    #[error("{field}: {message}")]
    Invariant { field: String, message: String },

    #[error("{}:{line}: {message}", path.display())]
    DispersionCsv {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Argument(String),

    #[error(transparent)]
    Core(#[from] standwave_core::Error),
}

impl CliError {
    pub fn invariant(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invariant {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::MissingFile(_) => "missing-file",
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::Invariant { .. } => "invariant",
            CliError::DispersionCsv { .. } => "dispersion-csv",
            CliError::Argument(_) => "argument",
            CliError::Core(e) => e.code(),
        }
    }

    /// `error: <code>: <message>` on one line.
    pub fn report(&self) -> String {
        let message = self.to_string().replace(['\n', '\r'], " ");
        format!("error: {}: {}", self.code(), message)
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingFile(path.to_path_buf())
        } else {
            CliError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}
