use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solvers, the kernel engine and the benchmark harness.
#[derive(Debug, Error)]
pub enum SpcaError {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is empty ({rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("vector is not unit norm (norm = {norm})")]
    NotUnit { norm: f64 },

    #[error("matrix is not on the Stiefel manifold (residual = {residual:e})")]
    NotStiefel { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rank-deficient matrix at iteration {iteration}: numerical rank {rank} < {expected}")]
    RankDeficient {
        rank: usize,
        expected: usize,
        iteration: usize,
    },

    #[error("problem of {bytes} bytes exceeds the allocation limit of {limit} bytes")]
    TooLarge { bytes: u64, limit: u64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SpcaError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SpcaError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end:
    /// 1 usage, 2 data, 3 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            SpcaError::InvalidConfig(_) => 1,
            SpcaError::EmptyMatrix { .. }
            | SpcaError::NonFinite { .. }
            | SpcaError::Parse { .. }
            | SpcaError::Data(_)
            | SpcaError::Io { .. }
            | SpcaError::TooLarge { .. } => 2,
            SpcaError::DimensionMismatch { .. }
            | SpcaError::NotUnit { .. }
            | SpcaError::NotStiefel { .. }
            | SpcaError::RankDeficient { .. } => 3,
        }
    }
}

pub type Result<T, E = SpcaError> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(SpcaError::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}
