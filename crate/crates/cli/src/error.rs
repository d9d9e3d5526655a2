use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] lbsphere::Error),

    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
}

/// Process exit statuses.
pub mod exit {
    pub const CONVERGED: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const NONCONVERGED: i32 = 2;
    pub const INVALID_CONFIG: i32 = 64;
}

impl CliError {
    pub fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::File {
            path: path.display().to_string(),
            source,
        }
    }

    /// Status for a run that failed with this error.
    pub fn exit_code(&self) -> i32 {
        use lbsphere::Error as E;
        match self {
            Self::Config(_) => exit::INVALID_CONFIG,
            Self::Core(
                E::Config(_)
                | E::QuadratureCapacity { .. }
                | E::InvalidGrid(_)
                | E::GridShape { .. }
                | E::Bandlimit { .. }
                | E::InvalidIndex { .. }
                | E::UnsupportedComposition { .. }
                | E::NoDecomposition { .. }
                | E::Parse { .. },
            ) => exit::INVALID_CONFIG,
            Self::Core(_) | Self::File { .. } => exit::FAILURE,
        }
    }
}
