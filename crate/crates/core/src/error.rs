use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input data, configuration or schema.
    Input,
    /// A numerical precondition failed.
    Computation,
    /// File system or network failure.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed row: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: duplicate observation for {country}/{indicator} year {year}")]
    DuplicateKey {
        line: u64,
        country: String,
        indicator: String,
        year: i32,
    },
    #[error("line {line}: cannot parse {field} value {value:?}")]
    UnparseableNumber {
        line: u64,
        field: String,
        value: String,
    },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("invalid series {key}: {reason}")]
    InvalidSeries { key: String, reason: String },
    #[error("duplicate series {0}")]
    DuplicateSeries(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("missing series {country}/{indicator}")]
    MissingSeries { country: String, indicator: String },
    #[error("missing cell {year} for {country}/{indicator}")]
    MissingCell {
        country: String,
        indicator: String,
        year: i32,
    },
    #[error("panel rejected with {count} validation error(s); first: {first}")]
    InvalidPanel { count: usize, first: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("year sets differ: {0}")]
    YearMismatch(String),
    #[error("gap in years at {year} for {key}")]
    YearGap { key: String, year: i32 },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("column {column} has zero mean and cannot be normalized")]
    ZeroMeanColumn { column: String },
    #[error("non-positive value {value} at index {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("singular normal equations: {0}")]
    Singular(String),
    #[error("zero value at index {index} used as a denominator")]
    ZeroValue { index: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("unknown {category} component {name:?}")]
    UnknownComponent { category: String, name: String },
    #[error("negative {what} value {value} in {year}")]
    NegativeValue { what: String, year: i32, value: f64 },
    #[error("cannot resolve {deduction} for {country} in {year}")]
    Unresolvable {
        country: String,
        deduction: String,
        year: i32,
    },
    #[error("HTTP {status} from {url}")]
    Http { status: u16, url: String },
    #[error("transport failure for {url}: {message}")]
    Transport { url: String, message: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("no observations returned for {country}/{indicator}")]
    NoObservations { country: String, indicator: String },
    #[error("plot has no series")]
    EmptyPlot,
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Io { .. } | Http { .. } | Transport { .. } | Serialize(_) => ErrorKind::Io,
            ZeroMeanColumn { .. }
            | NonPositiveValue { .. }
            | TooShort { .. }
            | Singular(_)
            | ZeroValue { .. }
            | Degenerate(_)
            | DimensionMismatch(_)
            | EmptyPlot => ErrorKind::Computation,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
