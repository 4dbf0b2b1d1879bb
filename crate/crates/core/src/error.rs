use thiserror::Error;

/// Errors surfaced by validation and the enumeration oracles.
///
/// Arithmetic bugs (inexact polynomial division, a count that fails its
/// integrality check) panic instead: they can never be produced by valid
/// input, only by a broken formula.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse group type `{0}`: expected `[]` or comma-separated positive integers")]
    ParseType(String),

    #[error("`{0}` is not an odd prime")]
    InvalidPrime(String),

    #[error("rank tower {0:?} is not weakly decreasing")]
    NonMonotoneTower(Vec<u32>),

    #[error("truncation bound {bound} is too small: need at least {needed}")]
    TruncationTooSmall { bound: u32, needed: u32 },

    #[error("{0}")]
    Precondition(String),

    #[error("oracle bound exceeded: {0}")]
    OracleBound(String),

    #[error("inconsistent torsion profile: {0}")]
    InconsistentTorsion(String),

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("cannot parse rational `{0}`: expected `num/den` or an integer")]
    ParseRational(String),

    #[error("cannot parse report: {0}")]
    ParseReport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
