use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at row {row}, column {column}: {message}")]
    Format {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch at row {row}: expected {expected} coordinates, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("non-finite coordinate at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("row {0} has zero norm and cannot be projected onto the unit sphere")]
    DegeneratePoint(usize),

    #[error("invalid simplex {word:#b} for {n} vertices")]
    InvalidSimplex { word: u64, n: usize },

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("removing a vertex would leave an empty simplex")]
    WouldEmpty,

    #[error("{n} vertices exceeds the supported maximum of {max}")]
    Size { n: usize, max: usize },

    #[error("invalid scale epsilon = {0}")]
    InvalidEpsilon(f64),

    #[error("dimension k = {k} is out of range for this complex (max {max})")]
    Dimension { k: usize, max: usize },

    #[error("complex has no level k = {0}; enumerate it with a larger kmax")]
    MissingLevel(usize),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("matrix is not symmetric (deviation {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: {0}")]
    Ordering(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid density matrix: {0}")]
    State(String),

    #[error("trace of the generator is zero; shift it by alpha * I before exponentiating")]
    RegularizationRequired,

    #[error("empty target set: no marked basis states")]
    EmptyTarget,

    #[error("mode aliasing: {0}")]
    Aliasing(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
