use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    // densities
    #[error("density needs at least one point")]
    EmptySupport,
    #[error("density grid is not strictly increasing at index {0}")]
    NonIncreasingGrid(usize),
    #[error("negative or non-finite mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("density masses sum to zero")]
    ZeroTotalMass,
    #[error("points and masses differ in length ({points} vs {masses})")]
    LengthMismatch { points: usize, masses: usize },
    #[error("quantile level {0} is outside (0, 1)")]
    QuantileOutOfRange(f64),
    #[error("invalid order {0}")]
    InvalidOrder(f64),

    // sets
    #[error("set must contain at least one element")]
    EmptySet,
    #[error("duplicate point {0}")]
    DuplicatePoint(f64),
    #[error("member supports overlap: [{left_lo}, {left_hi}] and [{right_lo}, {right_hi}]")]
    OverlappingSupports {
        left_lo: f64,
        left_hi: f64,
        right_lo: f64,
        right_hi: f64,
    },

    // change points
    #[error("segment of length {len} is shorter than the minimum {min}")]
    SegmentTooShort { len: usize, min: usize },
    #[error("series of length {len} is too short for minimum segment length {t_min}")]
    SeriesTooShort { len: usize, t_min: usize },
    #[error("non-finite value at index {0}")]
    NonFiniteInput(usize),
    #[error("no segment is long enough to split")]
    NoSplittableSegment,
    #[error("no interior change point to remove")]
    NoRemovableChangePoint,
    #[error("posterior has no retained samples")]
    EmptyPosterior,
    #[error("invalid sampler configuration: {0}")]
    InvalidSamplerConfig(String),
    #[error("numerical failure: {0}")]
    Numerical(String),

    // matrices
    #[error("need at least {needed} series, got {got}")]
    TooFewSeries { needed: usize, got: usize },
    #[error("empty collection")]
    EmptyCollection,
    #[error("series '{0}' has no interior change points")]
    EmptyMemberSet(String),
    #[error("matrix is not a valid distance matrix: {0}")]
    InvalidMatrix(String),

    // market
    #[error("non-positive price {value} for '{ticker}' at row {row}")]
    NonPositivePrice { ticker: String, row: usize, value: f64 },
    #[error("window [{start}, {end}] is invalid for length {len}")]
    InvalidWindow { start: usize, end: usize, len: usize },
    #[error("window of length {len} is shorter than {min}")]
    WindowTooShort { len: usize, min: usize },

    // io / config
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("dates are not strictly increasing at row {0}")]
    UnsortedDates(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Context { source, .. } => source.kind(),
            InvalidOrder(_) | InvalidSamplerConfig(_) | Config(_) | QuantileOutOfRange(_) => {
                ErrorKind::Config
            }
            Numerical(_) => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
