use thiserror::Error;

/// Errors produced by geometry construction, domination tests and the index.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval bounds must be finite, got [{lo}, {hi}]")]
    NonFiniteInterval { lo: f64, hi: f64 },

    #[error("interval lower bound {lo} exceeds upper bound {hi}")]
    InvertedInterval { lo: f64, hi: f64 },

    #[error("coordinate {index} is not finite ({value})")]
    NonFiniteCoordinate { index: usize, value: f64 },

    #[error("geometry must have at least one dimension")]
    ZeroDimensions,

    #[error("norm order must be a finite real >= 1, got {0}")]
    InvalidNorm(f64),

    #[error("incompatible operands: dimension {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("corner enumeration over {dims} dimensions exceeds the cap of {cap}")]
    CornerCapExceeded { dims: usize, cap: usize },

    #[error("bisector of identical points is undefined")]
    DegenerateBisector,

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("k must be at least 1")]
    ZeroK,

    #[error("fanout must be at least 2, got {0}")]
    InvalidFanout(usize),

    #[error("cannot index an empty dataset")]
    EmptyDataset,

    #[error("duplicate entry id {0}")]
    DuplicateId(u64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
