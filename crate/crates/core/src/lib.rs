//! Surrogate generation for nonstationary 1-D time series.
//!
//! The crate combines two detection front-ends with constrained iAAFT
//! surrogate engines:
//!
//! - **EEG-style signals**: feature-based offline changepoint detection
//!   segments the signal into quasi-stationary windows; each window is
//!   augmented with a fixed-edges iAAFT so that re-concatenation introduces
//!   no boundary artifacts ([`pipeline::augment_eeg`]).
//! - **ECG-style signals**: R-peak detection (on the signal and its
//!   negation) plus adaptive gap-filling yields a set of fixed samples; a
//!   fixed-points iAAFT preserves those samples exactly while randomizing
//!   everything else, followed by a peak-preserving Gaussian smoothing
//!   ([`pipeline::augment_ecg`]).
//!
//! A [`metrics`] module quantifies how well a surrogate retains the
//! original's periodogram, value histogram and STFT spectrogram.
//!
//! All entry points are pure functions of their inputs plus an explicit
//! seed, so every result is reproducible.

pub mod changepoint;
pub mod error;
pub mod filter;
pub mod iaaft;
pub mod metrics;
pub mod peaks;
pub mod pipeline;
pub mod signal;
pub mod synth;

mod fft;

pub use changepoint::{
    confirm_density, detect_changepoints, detect_excursions, ewma, lagged_diff, merge_and_filter,
    ChangepointConfig, ChangepointReport, ChangepointSet, EwmaSequence, Feature,
    LaggedDiffSequence,
};
pub use error::{Error, Result};
pub use iaaft::{
    iaaft, iaaft_fixed_edges, iaaft_fixed_points, smooth_preserving_peaks, IaaftConfig,
    SurrogateSet,
};
pub use metrics::{compare, SpectralReport};
pub use peaks::{detect_peaks, fill_gaps, FixedIndex, FixedIndexSet, FixedKind, PeakConfig};
pub use pipeline::{augment_ecg, augment_eeg, AugmentationRequest, AugmentationResult, Mode};
pub use signal::{
    bandpass_power, hjorth_complexity, rolling_moment, BandSpec, DiagnosticSequence, Moment,
    RollingConfig, Signal,
};
