use thiserror::Error;

use crate::search::SearchDiagnostics;

/// Errors produced by the solver and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("time {t} lies outside the arc domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("argument out of domain: {0}")]
    InvalidArgument(String),

    #[error("endpoint velocities are equal; the problem cannot be normalized")]
    DegenerateEqualVelocities,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("mu_u must be positive, got {0}")]
    InvalidMu(f64),

    #[error("tau bracket [{lo}, {hi}] does not straddle the root (residuals {r_lo}, {r_hi})")]
    BracketFailure {
        lo: f64,
        hi: f64,
        r_lo: f64,
        r_hi: f64,
    },

    #[error("classification mismatch: {0}")]
    ClassificationMismatch(String),

    #[error(
        "no continuous-acceleration root found after scanning {} grid cells; \
         the instance may be a bang-bang case just outside the classification \
         tolerance, or the grid may be too coarse",
        .0.grid_cells_scanned
    )]
    NoSolutionFound(Box<SearchDiagnostics>),

    #[error("transcription oracle inconclusive: {0}")]
    OracleInconclusive(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
