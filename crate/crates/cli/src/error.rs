use std::path::PathBuf;

use thiserror::Error;

/// Exit status for invalid configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when a solver fails or does not converge.
pub const EXIT_SOLVER: i32 = 3;
/// Exit status for command-line usage errors.
pub const EXIT_USAGE: i32 = 64;
/// Exit status for filesystem failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Solver(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<nsk_core::Error> for CliError {
    fn from(e: nsk_core::Error) -> Self {
        use nsk_core::Error as E;
        match e {
            E::Domain { .. }
            | E::Overflow(_)
            | E::Underflow(_)
            | E::InvalidParameter(_)
            | E::LengthMismatch { .. }
            | E::GridTooLarge { .. }
            | E::NoRoot { .. }
            | E::NoNormsSelected => CliError::Config(e.to_string()),
            E::DiagonalDerivative(_)
            | E::NonContraction { .. }
            | E::Positivity { .. }
            | E::NewtonDivergence { .. }
            | E::EmptyWindow { .. }
            | E::StepCollapse { .. }
            | E::TooFewPoints { .. } => CliError::Solver(e.to_string()),
        }
    }
}
