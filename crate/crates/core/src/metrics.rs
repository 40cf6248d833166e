//! Original-vs-surrogate comparison: periodogram, value histogram and STFT
//! spectrogram, each with a scalar distance.

use crate::error::{Error, Result};
use crate::fft::{amplitude_spectrum, FftPair};
use crate::signal::Signal;
use serde::Serialize;
use std::f64::consts::PI;

/// Power spectra of both series over shared one-sided frequency bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodogramPanel {
    pub freqs_hz: Vec<f64>,
    pub original: Vec<f64>,
    pub surrogate: Vec<f64>,
}

/// Value histograms of both series over shared equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramPanel {
    /// `bins + 1` edges spanning the pooled value range.
    pub bin_edges: Vec<f64>,
    pub original: Vec<u64>,
    pub surrogate: Vec<u64>,
}

/// Hann-windowed STFT magnitudes of both series, frame-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrogramPanel {
    pub window: usize,
    pub hop: usize,
    pub freqs_hz: Vec<f64>,
    /// Frame centers in seconds.
    pub times_s: Vec<f64>,
    pub original: Vec<Vec<f64>>,
    pub surrogate: Vec<Vec<f64>>,
}

/// Side-by-side spectral comparison plus scalar distances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub periodogram: PeriodogramPanel,
    pub histogram: HistogramPanel,
    pub spectrogram: SpectrogramPanel,
    /// ||(|FT(s)| - |FT(o)|)||_2 / |||FT(o)|||_2 over the two-sided spectrum.
    pub spectrum_rel_l2: f64,
    /// Total variation distance between the normalized histograms, in [0, 1].
    pub histogram_distance: f64,
    /// Relative Frobenius distance between the STFT magnitude matrices.
    pub spectrogram_rel_l2: f64,
}

pub const HISTOGRAM_BINS: usize = 64;

/// Default STFT geometry: 1-second Hann windows with 75% overlap at 256 Hz.
pub const DEFAULT_STFT_WINDOW: usize = 256;
pub const DEFAULT_STFT_HOP: usize = 64;

/// Compares a surrogate against its original.
pub fn compare(
    original: &Signal,
    surrogate: &[f64],
    stft_window: usize,
    stft_hop: usize,
) -> Result<SpectralReport> {
    let x = original.samples();
    if x.len() != surrogate.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: surrogate.len(),
        });
    }
    if let Some(index) = surrogate.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "surrogate samples",
            index,
        });
    }
    if stft_window < 2 || stft_hop < 1 {
        return Err(Error::InvalidConfig(
            "stft window must be >= 2 and hop >= 1".into(),
        ));
    }
    if stft_window > x.len() {
        return Err(Error::InsufficientLength {
            needed: stft_window,
            got: x.len(),
        });
    }

    let fs = original.fs();
    let n = x.len();

    // Periodogram: squared DFT magnitude; panel one-sided, distance over the
    // full two-sided amplitude spectrum.
    let amp_o = amplitude_spectrum(x);
    let amp_s = amplitude_spectrum(surrogate);
    let half = n / 2 + 1;
    let periodogram = PeriodogramPanel {
        freqs_hz: (0..half).map(|k| k as f64 * fs / n as f64).collect(),
        original: amp_o[..half].iter().map(|a| a * a).collect(),
        surrogate: amp_s[..half].iter().map(|a| a * a).collect(),
    };
    let spectrum_rel_l2 = rel_l2(
        amp_s.iter().copied(),
        amp_o.iter().copied(),
    );

    // Histogram over the pooled value range.
    let pooled_min = x.iter().chain(surrogate).fold(f64::INFINITY, |m, &v| m.min(v));
    let pooled_max = x.iter().chain(surrogate).fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let histogram = HistogramPanel {
        bin_edges: (0..=HISTOGRAM_BINS)
            .map(|i| pooled_min + (pooled_max - pooled_min) * i as f64 / HISTOGRAM_BINS as f64)
            .collect(),
        original: bin_counts(x, pooled_min, pooled_max),
        surrogate: bin_counts(surrogate, pooled_min, pooled_max),
    };
    let histogram_distance = total_variation(&histogram.original, &histogram.surrogate);

    // Hann STFT magnitudes.
    let frames_o = stft_magnitudes(x, stft_window, stft_hop);
    let frames_s = stft_magnitudes(surrogate, stft_window, stft_hop);
    let spectrogram_rel_l2 = rel_l2(
        frames_s.iter().flatten().copied(),
        frames_o.iter().flatten().copied(),
    );
    let stft_half = stft_window / 2 + 1;
    let spectrogram = SpectrogramPanel {
        window: stft_window,
        hop: stft_hop,
        freqs_hz: (0..stft_half)
            .map(|k| k as f64 * fs / stft_window as f64)
            .collect(),
        times_s: (0..frames_o.len())
            .map(|f| (f * stft_hop + stft_window / 2) as f64 / fs)
            .collect(),
        original: frames_o,
        surrogate: frames_s,
    };

    Ok(SpectralReport {
        periodogram,
        histogram,
        spectrogram,
        spectrum_rel_l2,
        histogram_distance,
        spectrogram_rel_l2,
    })
}

fn rel_l2(candidate: impl Iterator<Item = f64>, reference: impl Iterator<Item = f64> + Clone) -> f64 {
    let den: f64 = reference.clone().map(|v| v * v).sum::<f64>().sqrt();
    let num: f64 = candidate
        .zip(reference)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

fn bin_counts(values: &[f64], min: f64, max: f64) -> Vec<u64> {
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    let range = max - min;
    for &v in values {
        let bin = if range == 0.0 {
            0
        } else {
            (((v - min) / range) * HISTOGRAM_BINS as f64)
                .floor()
                .min((HISTOGRAM_BINS - 1) as f64) as usize
        };
        counts[bin] += 1;
    }
    counts
}

fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let (na, nb): (u64, u64) = (a.iter().sum(), b.iter().sum());
    if na == 0 || nb == 0 {
        return 0.0;
    }
    0.5 * a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs())
        .sum::<f64>()
}

/// One-sided STFT magnitude frames (Hann window, no padding: frames that
/// would overrun the signal are dropped).
fn stft_magnitudes(x: &[f64], window: usize, hop: usize) -> Vec<Vec<f64>> {
    let hann: Vec<f64> = (0..window)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (window - 1) as f64).cos())
        .collect();
    let fft = FftPair::new(window);
    let half = window / 2 + 1;
    let mut frames = Vec::new();
    let mut start = 0;
    while start + window <= x.len() {
        let tapered: Vec<f64> = x[start..start + window]
            .iter()
            .zip(&hann)
            .map(|(v, w)| v * w)
            .collect();
        let spectrum = fft.forward(&tapered);
        frames.push(spectrum[..half].iter().map(|c| c.norm()).collect());
        start += hop;
    }
    frames
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn noise_signal(n: usize, seed: u64) -> Signal {
        Signal::new(synth::white_noise(n, seed), 256.0).unwrap()
    }

    #[test]
    fn identical_inputs_have_zero_distances() {
        let s = noise_signal(1024, 1);
        let report = compare(&s, s.samples(), 256, 64).unwrap();
        assert_eq!(report.spectrum_rel_l2, 0.0);
        assert_eq!(report.histogram_distance, 0.0);
        assert_eq!(report.spectrogram_rel_l2, 0.0);
    }

    #[test]
    fn permutation_has_zero_histogram_distance() {
        let s = noise_signal(512, 2);
        let mut permuted = s.samples().to_vec();
        permuted.reverse();
        let report = compare(&s, &permuted, 128, 32).unwrap();
        assert_eq!(report.histogram_distance, 0.0);
        assert!(report.spectrum_rel_l2 > 0.0);
    }

    #[test]
    fn histogram_distance_is_symmetric() {
        let a = noise_signal(800, 3);
        let b_values = synth::white_noise(800, 4);
        let b = Signal::new(b_values.clone(), 256.0).unwrap();
        let ab = compare(&a, &b_values, 256, 64).unwrap();
        let ba = compare(&b, a.samples(), 256, 64).unwrap();
        assert!((ab.histogram_distance - ba.histogram_distance).abs() < 1e-15);
        assert!(ab.histogram_distance > 0.0);
    }

    #[test]
    fn rejects_length_mismatch() {
        let s = noise_signal(256, 5);
        assert!(matches!(
            compare(&s, &vec![0.0; 255], 64, 16),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn rejects_oversized_window() {
        let s = noise_signal(128, 6);
        assert!(matches!(
            compare(&s, s.samples(), 256, 64),
            Err(Error::InsufficientLength { .. })
        ));
    }

    #[test]
    fn spectrogram_geometry_matches_config() {
        let s = noise_signal(1024, 7);
        let report = compare(&s, s.samples(), 256, 64).unwrap();
        let frames = (1024 - 256) / 64 + 1;
        assert_eq!(report.spectrogram.original.len(), frames);
        assert_eq!(report.spectrogram.original[0].len(), 129);
        assert_eq!(report.spectrogram.freqs_hz.len(), 129);
        assert_eq!(report.spectrogram.times_s.len(), frames);
        assert_eq!(report.histogram.bin_edges.len(), HISTOGRAM_BINS + 1);
    }

    #[test]
    fn constant_pair_has_degenerate_histogram() {
        let s = Signal::new(vec![1.0; 300], 256.0).unwrap();
        let report = compare(&s, &vec![1.0; 300], 256, 64).unwrap();
        assert_eq!(report.histogram_distance, 0.0);
        assert_eq!(report.histogram.original[0], 300);
    }
}
