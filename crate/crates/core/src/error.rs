//! Error types shared across the crate.
//!
//! Errors split into two classes that map onto the CLI exit codes:
//! input errors (exit code 2) and numerical failures (exit code 3).

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected} voxels, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("voxel {voxel} references phase {phase}, but only {phase_count} phases are defined")]
    UnknownPhase {
        voxel: usize,
        phase: usize,
        phase_count: usize,
    },

    #[error("invalid material{}: {}", phase.map(|p| format!(" (phase {p})")).unwrap_or_default(), failures.join("; "))]
    InvalidMaterial {
        phase: Option<usize>,
        failures: Vec<String>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "linear solver did not converge within {iterations} iterations (relative residual {residual:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        /// Relative residual after each iteration, for diagnosis.
        history: Vec<f64>,
    },

    #[error("matrix is ill-conditioned: condition estimate {condition:.3e} exceeds {threshold:.3e}")]
    IllConditioned { condition: f64, threshold: f64 },

    #[error("singular system: {0}")]
    Singular(String),
}

impl Error {
    /// CLI exit code class: 2 for input errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Parse(_)
            | Error::DimensionMismatch { .. }
            | Error::UnknownPhase { .. }
            | Error::InvalidMaterial { .. }
            | Error::InvalidArgument(_) => 2,
            Error::NonConvergence { .. } | Error::IllConditioned { .. } | Error::Singular(_) => 3,
        }
    }

    pub fn is_input(&self) -> bool {
        self.exit_code() == 2
    }

    pub fn is_numerical(&self) -> bool {
        self.exit_code() == 3
    }
}
