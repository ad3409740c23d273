use thiserror::Error;

/// Failures that stop a run before a report can be produced.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("computation failed at point {index}: {source}")]
    Computation {
        index: usize,
        #[source]
        source: g2kit::Error,
    },

    #[error("cannot write report to {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Process exit code: 2 for configuration problems, 3 for failed computations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Computation { .. } | CliError::Output { .. } => 3,
        }
    }
}
