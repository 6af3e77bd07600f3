use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: gamma non-increasing ({gamma} follows {previous})")]
    GammaNotIncreasing {
        line: usize,
        gamma: String,
        previous: String,
    },

    #[error("line {line}: psi = {psi} lies outside (-pi, pi]")]
    PsiOutOfRange { line: usize, psi: String },

    #[error("line {line}: {digits} significant digits, at least {required} required")]
    TooFewDigits {
        line: usize,
        digits: usize,
        required: usize,
    },

    #[error("no zeros below the height cutoff {cutoff}")]
    EmptyDataset { cutoff: f64 },

    #[error("requested {requested} zeros but the dataset holds {available}")]
    NotEnoughZeros { requested: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("basis is numerically rank deficient at row {row} (precision {precision} bits)")]
    RankDeficient { row: usize, precision: u32 },

    #[error("size reduction could not certify |mu| <= 1/2 at precision {precision} bits")]
    SizeReductionUncertified { precision: u32 },

    #[error("LLL exceeded its iteration cap of {cap} swaps (dim {dim}, {bits} entry bits)")]
    IterationCap { cap: u64, dim: usize, bits: u64 },

    #[error("floor of {what} not certified at {precision} bits")]
    FloorUncertified { what: String, precision: u32 },

    #[error("zero #{index} (gamma = {gamma}) carries too few digits for y = {y}")]
    InsufficientZeroPrecision {
        index: usize,
        gamma: String,
        y: String,
    },

    #[error("interval width {width:e} exceeds the target at {precision} bits; retry with more precision")]
    NeedsMorePrecision { width: f64, precision: u32 },

    #[error("{0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
