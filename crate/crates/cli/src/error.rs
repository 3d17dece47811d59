use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}: no such file")]
    MissingFile(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: expected header {expected:?}, found {found:?}")]
    BadHeader {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}, line {line}: label {value:?} is not 0 or 1")]
    BadLabel {
        path: PathBuf,
        line: u64,
        value: String,
    },
    #[error("{0}: manifest has no entries")]
    EmptyManifest(PathBuf),
    #[error("{path}, line {line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    InvalidConfig(String),
    #[error("none of the {0} manifest entries could be processed")]
    NoFilesSucceeded(usize),
    #[error(transparent)]
    Pipeline(#[from] imfclass_core::Error),
}

impl CliError {
    /// Process exit code; stable per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidConfig(_) => 2,
            CliError::MissingFile(_) | CliError::Io { .. } => 3,
            CliError::BadHeader { .. }
            | CliError::BadLabel { .. }
            | CliError::EmptyManifest(_)
            | CliError::BadRecord { .. } => 4,
            CliError::NoFilesSucceeded(_) | CliError::Pipeline(_) => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingFile(path)
        } else {
            CliError::Io { path, source }
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, e: csv::Error) -> Self {
        let path = path.into();
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::io(path, source),
            other => CliError::BadRecord {
                path,
                line,
                message: format!("{other:?}"),
            },
        }
    }
}

impl From<imfclass_core::EvalError> for CliError {
    fn from(e: imfclass_core::EvalError) -> Self {
        CliError::Pipeline(e.into())
    }
}

impl From<imfclass_core::FeatureError> for CliError {
    fn from(e: imfclass_core::FeatureError) -> Self {
        CliError::Pipeline(e.into())
    }
}
