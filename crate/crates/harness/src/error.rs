use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] rsgda_core::Error),
    #[error("{}: byte offset {offset}: {reason}", path.display())]
    Format {
        path: PathBuf,
        offset: u64,
        reason: String,
    },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Sweep(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// An error at one point of a sweep.
    #[error("at {label}: {source}")]
    Point {
        label: String,
        source: Box<HarnessError>,
    },
}

impl HarnessError {
    /// Short machine-readable category, printed before the message on failure.
    pub fn category(&self) -> &'static str {
        match self {
            HarnessError::Core(e) => e.category(),
            HarnessError::Format { .. } => "format",
            HarnessError::Config(_) => "config",
            HarnessError::Sweep(_) => "sweep",
            HarnessError::Io { .. } | HarnessError::Csv(_) => "io",
            HarnessError::Point { source, .. } => source.category(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        HarnessError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
