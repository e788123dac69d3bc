use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight {0} is not strictly positive")]
    NonPositiveWeight(f64),

    #[error("total mass {0} differs from 1 by more than 1e-12")]
    MassNotNormalized(f64),

    #[error("measure has no atoms and no uniform pieces")]
    EmptyMeasure,

    #[error("uniform piece [{a}, {b}] is degenerate or reversed")]
    BadUniformPiece { a: f64, b: f64 },

    #[error("non-finite coordinate {0}")]
    NonFinite(f64),

    #[error("mass level {0} is outside the open interval (0, 1)")]
    MassLevelOutOfRange(f64),

    #[error("t = {t} lies outside the extension interval {interval}")]
    OutsideExtension { t: f64, interval: String },

    #[error("expected exactly two atoms, found {0}")]
    AtomCount(usize),

    #[error("measure has {atoms} atoms; the exotic flow is capped at {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },

    #[error("measure has an absolutely continuous part; quantize it first")]
    NonAtomic,

    #[error("shape parameter {0} is too large to represent the two-atom weights")]
    ShapeOverflow(f64),

    #[error("deviation must be non-negative, got {0}")]
    NegativeDeviation(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("problem size {rows}x{cols} exceeds the cap {cap}x{cap}")]
    SizeCap {
        rows: usize,
        cols: usize,
        cap: usize,
    },

    #[error("solver `{solver}` cannot handle this input: {reason}")]
    Unsupported {
        solver: &'static str,
        reason: String,
    },

    #[error("unknown solver `{0}`")]
    UnknownSolver(String),

    #[error("coupling marginals do not match the measures")]
    InvalidCoupling,

    #[error("tuple is not sorted at position {0}")]
    UnsortedTuple(usize),

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
