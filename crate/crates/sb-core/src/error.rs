//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by problem construction, encoding, solving and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix did not have the expected length.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// Construction-time validation failure (non-finite entries, bad knobs, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Exhaustive search requested on an instance above the enumeration bound.
    #[error("instance has {bits} spins, exhaustive enumeration is limited to {max}")]
    EnumerationBound { bits: usize, max: usize },

    /// Full sorted-value export requested on an instance above the export cap.
    #[error("sorted-value export limited to 2^{max_bits} configurations, instance has 2^{bits}")]
    ValueExportBound { bits: usize, max_bits: usize },

    /// Per-asset unit cap that cannot be represented exactly by whole bits.
    #[error("unit cap {cap} is not of the form 2^B - 1 (allowed: 1, 3, 7, 15, ...)")]
    InvalidUnitCap { cap: u32 },

    /// A weight fell outside the hard per-asset bounds.
    #[error("weight {weight} outside [0, {cap}] for asset {asset} at time {time}")]
    CapViolation {
        asset: usize,
        time: usize,
        weight: i64,
        cap: u32,
    },

    /// Oscillator state stopped being representable; the run cannot continue.
    #[error("oscillator state became non-finite at step {step}")]
    NonFiniteState { step: usize },

    /// Index referred to an asset that does not exist.
    #[error("asset index {index} out of range for {n_assets} assets")]
    AssetIndexOutOfRange { index: usize, n_assets: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
