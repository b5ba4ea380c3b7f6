use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("missing input: {0}")]
    MissingInput(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Invalid(_) | CliError::MissingInput(_) => ExitCode::from(1),
            CliError::Io { .. } => ExitCode::from(2),
        }
    }

    /// Maps an error on `path`: not-found becomes a missing input, anything else an I/O failure.
    pub fn from_io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            CliError::MissingInput(path)
        } else {
            CliError::Io { path, source }
        }
    }
}

impl From<paramine::ingest::IngestError> for CliError {
    fn from(e: paramine::ingest::IngestError) -> Self {
        match e {
            paramine::ingest::IngestError::Io { path, source } => CliError::from_io(path, source),
        }
    }
}
