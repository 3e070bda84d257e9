use std::path::PathBuf;

/// Errors produced by simulation, optimization and the experiment pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// A norm vector or genome violates its bounds or simplex constraint.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// The state cannot be scored, e.g. every citizen holds zero wealth.
    #[error("degenerate state: {0}")]
    Degenerate(String),

    /// Caller broke a precondition (empty input, mismatched objective sets).
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("malformed input in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("missing front files:\n{}", list_paths(.0))]
    MissingFronts(Vec<PathBuf>),

    #[error("{failed} of {total} runs failed:\n{}", .failures.join("\n"))]
    Batch {
        failed: usize,
        total: usize,
        failures: Vec<String>,
    },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Constraint(_)
                | Error::Contract(_)
                | Error::Parse { .. }
                | Error::MissingFronts(_)
        )
    }
}

fn list_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| format!("  {}", p.display()))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
