use thiserror::Error;

/// Errors produced by kernels, pipelines, and file ingestion.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: left operand has {left}, right operand has {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix shape {rows}x{cols} does not match buffer length {len}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { value: f64, index: usize },

    #[error("operator {found} is not valid here (expected {expected})")]
    InvalidOperator { expected: String, found: String },

    #[error("degenerate iterate: norm vanished at iteration {iteration}")]
    DegenerateIterate { iteration: usize },

    #[error("matrix entry ({row},{col}) = {value} violates strict positivity")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("pixel value {value} outside [0,1] at index {index}")]
    PixelOutOfRange { value: f64, index: usize },

    #[error("image {width}x{height} is not divisible into {tile}x{tile} tiles")]
    TileMismatch { width: usize, height: usize, tile: usize },

    #[error("requested {requested} tiles but the image only has {available}")]
    TooManyTiles { requested: usize, available: usize },

    #[error("images are identical; PSNR is unbounded")]
    IdenticalImages,

    #[error("batch size {batch} exceeds sample count {samples}")]
    BatchTooLarge { batch: usize, samples: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("negative entry {value} at index {index} not allowed for MAVP PageRank")]
    NegativeEntry { value: f64, index: usize },

    #[error("PGM format error: {0}")]
    Pgm(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
