use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not Hermitian (max |ρ[m][n] − conj ρ[n][m]| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace {trace} is not within {tolerance:e} of 1")]
    TraceMismatch { trace: f64, tolerance: f64 },

    #[error("smallest eigenvalue {min_eigenvalue:e} is below −{tolerance:e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Gauss–Hermite order {order} is insufficient: doubling the order changed the result by {change:.3e}")]
    InsufficientQuadrature { order: usize, change: f64 },

    #[error("derivative order {requested} exceeds the certified maximum {max}")]
    DerivativeOrderOverflow { requested: usize, max: usize },

    #[error("outside the formula's domain: {0}")]
    Domain(String),

    #[error("angle grid too coarse: {found} angles, exact angular quadrature needs at least {required}")]
    GridTooCoarse { found: usize, required: usize },

    #[error("insufficient angle coverage: {0}")]
    AngleCoverage(String),

    #[error("state mass {mass:.3e} on the two highest Fock levels exceeds {tolerance:e}")]
    TruncationEdge { mass: f64, tolerance: f64 },

    #[error("numerical certification failed: {0}")]
    Certification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Numerical-certification failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InsufficientQuadrature { .. }
                | Error::DerivativeOrderOverflow { .. }
                | Error::Certification(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "invalid-config",
            Error::NotHermitian { .. } => "not-hermitian",
            Error::TraceMismatch { .. } => "trace-mismatch",
            Error::NotPositive { .. } => "not-positive",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InsufficientQuadrature { .. } => "insufficient-quadrature",
            Error::DerivativeOrderOverflow { .. } => "order-overflow",
            Error::Domain(_) => "domain",
            Error::GridTooCoarse { .. } => "grid-too-coarse",
            Error::AngleCoverage(_) => "angle-coverage",
            Error::TruncationEdge { .. } => "truncation-edge",
            Error::Certification(_) => "certification",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// Population on the two highest Fock levels above 1e-6.
    Truncation { mass: f64 },
    /// A sample batch smaller than 1000 draws.
    InsufficientSamples { theta: f64, count: usize },
    /// Phase-space surface still above 1e-6 on the grid boundary.
    Support { boundary_max: f64 },
}
