use thiserror::Error;

/// Errors raised across encoding, channel modeling, decoding and the sweep harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Gram-Schmidt residual column fell below the rank threshold.
    #[error("rank-deficient matrix: column {column} has residual norm {norm:e}")]
    RankDeficient { column: usize, norm: f64 },

    #[error("unsupported constellation order {0}; expected 4, 16 or 64")]
    UnsupportedOrder(usize),

    /// A diagonal entry of R is too small to normalize by.
    #[error("degenerate channel: R[{index},{index}] = {value:e}")]
    DegenerateChannel { index: usize, value: f64 },

    #[error("exhaustive search over order {0} constellations is refused (only QPSK is supported)")]
    SearchTooLarge(usize),

    #[error("decoder `{0}` requires the new codeword variant")]
    VariantRequired(&'static str),

    #[error("unknown decoder `{0}`")]
    UnknownDecoder(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
