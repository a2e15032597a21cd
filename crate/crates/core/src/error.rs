use thiserror::Error;

/// Errors raised while building or querying the indexes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("negative coordinate {value} in input")]
    NegativeCoordinate { value: i64 },

    #[error("coordinate {value} lies outside the universe [0, {side})")]
    OutOfUniverse { value: i64, side: i64 },

    #[error("box with extents {longest}x{shortest} exceeds aspect bound {alpha}")]
    FatnessViolation {
        longest: i64,
        shortest: i64,
        alpha: String,
    },

    #[error("duplicate point: input indices {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("point set of size {len} exceeds capacity {cap}")]
    Capacity { len: usize, cap: usize },

    #[error("invalid range: lower bound {lo} exceeds upper bound {hi}")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("query is not a square/cube: extents {extents:?}")]
    NotSquare { extents: Vec<i64> },

    #[error("query lies inside a single grid cell; descend first")]
    InsideSingleCell,

    #[error("four-sided query needs x2 - x1 > {side}, got {width}")]
    NarrowFourSided { width: i64, side: i64 },

    #[error("oracle refused input: {0}")]
    OracleGuard(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
