use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite after {attempts} factorization attempts (last jitter {last_jitter:e})")]
    NotPositiveDefinite { attempts: usize, last_jitter: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} actual values vs {right} predicted values")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite input value")]
    NonFiniteInput,

    #[error("empty input")]
    EmptyInput,

    #[error("ensemble weights sum to zero")]
    ZeroWeightSum,

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("numerical error: {0}")]
    NumericalError(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("optimization history is empty")]
    EmptyHistory,

    #[error("every evaluated trial failed; no best weights available")]
    NoValidTrial,

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("unparseable stream: {0}")]
    UnparseableStream(String),

    #[error("no records for category {0}")]
    NoRecordsForCategory(String),

    #[error("series too short: {len} points, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
