//! Crate-wide error type.

/// Errors produced by scenario validation, estimation, and file handling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An angle or other physical parameter is outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario, grid, or pipeline configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// The two polarization vectors of a DST source are parallel, which
    /// collapses its rank-2 signature and makes it indistinguishable from an
    /// SST source.
    #[error("degenerate DST source: {0}")]
    DegenerateDst(String),

    /// A numerical procedure failed (singular Fisher information,
    /// non-Hermitian covariance, failed factorization).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Polarization was requested at a direction where the test matrix has
    /// rank 0; every polarization fits there, so none can be reported.
    #[error("polarization is ambiguous at this direction (rank-0 test matrix)")]
    AmbiguousPolarization,

    /// File input/output failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
