use std::fmt;
use std::path::PathBuf;

/// Failures of a verb, mapped to exit codes by `main`.
#[derive(Debug)]
pub enum CliError {
    Core(kkwave::Error),
    /// A run directory lacks a file the verb reads.
    MissingArtifacts(PathBuf),
    Io { path: PathBuf, source: std::io::Error },
    /// Bad flag value found after clap parsing.
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::MissingArtifacts(p) => write!(f, "missing artifacts: {} not found", p.display()),
            CliError::Io { path, source } => write!(f, "io: {}: {source}", path.display()),
            CliError::Usage(m) => write!(f, "usage: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<kkwave::Error> for CliError {
    fn from(e: kkwave::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
