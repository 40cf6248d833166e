//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by signal validation, detectors and surrogate engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A sample or derived value was NaN or infinite.
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    /// Sampling rate must be strictly positive.
    #[error("invalid sampling rate {fs} Hz (must be > 0)")]
    InvalidSamplingRate { fs: f64 },

    /// Input shorter than the operation requires.
    #[error("insufficient length: need at least {needed} samples, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    /// Band edges incompatible with the sampling rate.
    #[error("invalid band {low_hz}-{high_hz} Hz: edges must satisfy 0 < low < high < {nyquist_hz} Hz")]
    InvalidBand {
        low_hz: f64,
        high_hz: f64,
        nyquist_hz: f64,
    },

    /// Empty sequence where at least one value is required.
    #[error("empty input")]
    EmptyInput,

    /// Fixed-edge margin leaves no free interior.
    #[error("invalid margin {margin} for length {len}: 2*margin must be < len")]
    InvalidMargin { margin: usize, len: usize },

    /// A fixed index lies outside the signal.
    #[error("fixed index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// Two sequences that must agree in length do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A configuration field violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Channels of a multi-channel request disagree on fs or length.
    #[error("channel {channel}: {reason}")]
    ChannelMismatch { channel: usize, reason: String },

    /// An engine error tagged with the sub-segment it occurred in.
    #[error("segment {segment} [{start}..{end}): {source}")]
    Segment {
        segment: usize,
        start: usize,
        end: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
