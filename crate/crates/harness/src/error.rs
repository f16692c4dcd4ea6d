use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Solver {
        context: String,
        source: apwb_core::Error,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv error in {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("malformed table {}: {reason}", path.display())]
    Schema { path: PathBuf, reason: String },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

impl HarnessError {
    pub fn solver(context: impl Into<String>, source: apwb_core::Error) -> Self {
        HarnessError::Solver {
            context: context.into(),
            source,
        }
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(
            self,
            HarnessError::Solver {
                source: apwb_core::Error::BlowUp { .. },
                ..
            }
        )
    }

    /// 2 for configuration errors, 3 for a blow-up, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ if self.is_blow_up() => 3,
            _ => 1,
        }
    }
}
