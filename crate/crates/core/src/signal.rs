//! Core signal representation and diagnostic-sequence extraction.
//!
//! A diagnostic sequence is a per-feature series derived from the raw
//! signal (band power, rolling moment, Hjorth complexity) on which regime
//! changes show up as mean shifts. Every extractor records the offset of
//! its first value in original-signal coordinates so downstream detectors
//! can translate indices back.

use crate::error::{Error, Result};
use crate::filter;
use serde::Serialize;

/// A uniformly sampled real-valued series with its sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    /// Validates and wraps a sample buffer: at least two finite samples,
    /// strictly positive sampling rate.
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidSamplingRate { fs });
        }
        if samples.len() < 2 {
            return Err(Error::InsufficientLength {
                needed: 2,
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "signal samples",
                index,
            });
        }
        Ok(Self { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// A named frequency band in Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSpec {
    pub name: String,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl BandSpec {
    pub fn new(name: impl Into<String>, low_hz: f64, high_hz: f64) -> Self {
        Self {
            name: name.into(),
            low_hz,
            high_hz,
        }
    }

    /// Theta band, 4-8 Hz.
    pub fn theta() -> Self {
        Self::new("theta", 4.0, 8.0)
    }

    /// Alpha band, 8-12 Hz.
    pub fn alpha() -> Self {
        Self::new("alpha", 8.0, 12.0)
    }

    /// Beta band, 12-30 Hz.
    pub fn beta() -> Self {
        Self::new("beta", 12.0, 30.0)
    }
}

/// Rolling-window geometry for moment and Hjorth features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RollingConfig {
    pub window: usize,
    pub stride: usize,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window: 64,
            stride: 1,
        }
    }
}

impl RollingConfig {
    fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidConfig(format!(
                "rolling window must be >= 2, got {}",
                self.window
            )));
        }
        if self.stride < 1 {
            return Err(Error::InvalidConfig("rolling stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// A feature-derived series with its position in original-signal coordinates.
///
/// `values[i]` describes original sample `start_offset + i * stride`; all
/// built-in extractors here use stride 1. `degenerate` lists output indices
/// where a zero-variance window forced the value-0 convention.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSequence {
    pub feature: String,
    pub values: Vec<f64>,
    pub start_offset: usize,
    pub degenerate: Vec<usize>,
}

/// Which rolling moment to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Mean,
    /// Population variance.
    Variance,
    /// Excess kurtosis (0 for a Gaussian); 0 with a degenerate flag on
    /// zero-variance windows.
    Kurtosis,
}

impl Moment {
    fn label(self) -> &'static str {
        match self {
            Moment::Mean => "mean",
            Moment::Variance => "variance",
            Moment::Kurtosis => "kurtosis",
        }
    }
}

/// Squared output of a causal 5th-order Butterworth bandpass filter.
///
/// The filter state starts at the steady-state response to the first
/// sample, so a constant signal produces an identically-zero diagnostic
/// instead of a startup transient.
pub fn bandpass_power(signal: &Signal, band: &BandSpec) -> Result<DiagnosticSequence> {
    let sos = filter::butter_bandpass(5, band.low_hz, band.high_hz, signal.fs())?;
    let filtered = filter::sosfilt_stepinit(&sos, signal.samples());
    Ok(DiagnosticSequence {
        feature: format!("{}_power", band.name),
        values: filtered.into_iter().map(|v| v * v).collect(),
        start_offset: 0,
        degenerate: Vec::new(),
    })
}

/// Rolling moment over `cfg.window`-sample windows, one value per window
/// position, attributed to the window's last sample.
pub fn rolling_moment(signal: &Signal, cfg: &RollingConfig, moment: Moment) -> Result<DiagnosticSequence> {
    cfg.validate()?;
    let x = signal.samples();
    if x.len() < cfg.window {
        return Err(Error::InsufficientLength {
            needed: cfg.window,
            got: x.len(),
        });
    }

    let mut values = Vec::new();
    let mut degenerate = Vec::new();
    let mut start = 0;
    while start + cfg.window <= x.len() {
        let w = &x[start..start + cfg.window];
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let value = match moment {
            Moment::Mean => mean,
            Moment::Variance => w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n,
            Moment::Kurtosis => {
                let m2 = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                if m2 == 0.0 {
                    degenerate.push(values.len());
                    0.0
                } else {
                    let m4 = w.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
                    m4 / (m2 * m2) - 3.0
                }
            }
        };
        values.push(value);
        start += cfg.stride;
    }

    Ok(DiagnosticSequence {
        feature: moment.label().to_string(),
        values,
        start_offset: cfg.window - 1,
        degenerate,
    })
}

/// Rolling Hjorth complexity: mobility of the first difference divided by
/// mobility of the window, where mobility(x) = sqrt(var(diff x) / var(x)).
/// A pure sinusoid scores 1; rougher series score higher. Zero-variance
/// windows (constant or perfectly linear) yield 0 with a degenerate flag.
pub fn hjorth_complexity(signal: &Signal, cfg: &RollingConfig) -> Result<DiagnosticSequence> {
    cfg.validate()?;
    if cfg.window < 3 {
        return Err(Error::InvalidConfig(
            "hjorth complexity needs a window of at least 3 samples".into(),
        ));
    }
    let x = signal.samples();
    if x.len() < cfg.window {
        return Err(Error::InsufficientLength {
            needed: cfg.window,
            got: x.len(),
        });
    }

    let var = |v: &[f64]| {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        v.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n
    };

    let mut values = Vec::new();
    let mut degenerate = Vec::new();
    let mut start = 0;
    while start + cfg.window <= x.len() {
        let w = &x[start..start + cfg.window];
        let d1: Vec<f64> = w.windows(2).map(|p| p[1] - p[0]).collect();
        let d2: Vec<f64> = d1.windows(2).map(|p| p[1] - p[0]).collect();
        let (v0, v1, v2) = (var(w), var(&d1), var(&d2));
        if v0 == 0.0 || v1 == 0.0 {
            degenerate.push(values.len());
            values.push(0.0);
        } else {
            // mobility(d1)/mobility(w) = sqrt(v2/v1) / sqrt(v1/v0)
            values.push((v2 * v0).sqrt() / v1);
        }
        start += cfg.stride;
    }

    Ok(DiagnosticSequence {
        feature: "hjorth_complexity".to_string(),
        values,
        start_offset: cfg.window - 1,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sine(freq: f64, fs: f64, n: usize) -> Signal {
        Signal::new(
            (0..n).map(|i| (2.0 * PI * freq * i as f64 / fs).sin()).collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn signal_rejects_bad_inputs() {
        assert!(matches!(
            Signal::new(vec![1.0], 256.0),
            Err(Error::InsufficientLength { .. })
        ));
        assert!(matches!(
            Signal::new(vec![1.0, f64::NAN], 256.0),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            Signal::new(vec![1.0, 2.0], 0.0),
            Err(Error::InvalidSamplingRate { .. })
        ));
    }

    #[test]
    fn bandpass_power_concentrates_at_tone_frequency() {
        let s = sine(10.0, 256.0, 512);
        let alpha = bandpass_power(&s, &BandSpec::alpha()).unwrap();
        let theta = bandpass_power(&s, &BandSpec::theta()).unwrap();
        let mean = |d: &DiagnosticSequence| d.values.iter().sum::<f64>() / d.values.len() as f64;
        let ratio = mean(&alpha) / mean(&theta);
        assert!(ratio > 10.0, "alpha/theta power ratio {ratio}");
        assert!(alpha.values.iter().all(|&v| v >= 0.0));
        assert_eq!(alpha.values.len(), s.len());
        assert_eq!(alpha.start_offset, 0);
    }

    #[test]
    fn bandpass_power_of_zeros_is_zero() {
        let s = Signal::new(vec![0.0; 256], 256.0).unwrap();
        let d = bandpass_power(&s, &BandSpec::beta()).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bandpass_power_rejects_dc() {
        let s = Signal::new(vec![5.0; 4096], 256.0).unwrap();
        let d = bandpass_power(&s, &BandSpec::theta()).unwrap();
        let tail_max = d.values[3584..].iter().fold(0.0f64, |m, &v| m.max(v));
        assert!(tail_max < 1e-6 * 25.0, "steady-state power {tail_max}");
    }

    #[test]
    fn bandpass_power_rejects_out_of_range_band() {
        let s = sine(10.0, 256.0, 128);
        let err = bandpass_power(&s, &BandSpec::new("bad", 100.0, 140.0, )).unwrap_err();
        assert!(matches!(err, Error::InvalidBand { .. }));
    }

    #[test]
    fn rolling_variance_hand_computed() {
        let s = Signal::new(vec![1.0, 2.0, 3.0], 256.0).unwrap();
        let cfg = RollingConfig { window: 3, stride: 1 };
        let d = rolling_moment(&s, &cfg, Moment::Variance).unwrap();
        assert_eq!(d.values, vec![2.0 / 3.0]);
        assert_eq!(d.start_offset, 2);
    }

    #[test]
    fn rolling_moments_of_constant_signal() {
        let s = Signal::new(vec![2.5; 100], 256.0).unwrap();
        let cfg = RollingConfig { window: 16, stride: 1 };
        let var = rolling_moment(&s, &cfg, Moment::Variance).unwrap();
        assert!(var.values.iter().all(|&v| v == 0.0));
        let kurt = rolling_moment(&s, &cfg, Moment::Kurtosis).unwrap();
        assert!(kurt.values.iter().all(|&v| v == 0.0));
        assert_eq!(kurt.degenerate.len(), kurt.values.len());
        let mean = rolling_moment(&s, &cfg, Moment::Mean).unwrap();
        assert!(mean.values.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn rolling_output_length_matches_window_count() {
        let s = sine(5.0, 256.0, 300);
        let cfg = RollingConfig { window: 64, stride: 1 };
        let d = rolling_moment(&s, &cfg, Moment::Variance).unwrap();
        assert_eq!(d.values.len(), 300 - 64 + 1);
    }

    #[test]
    fn rolling_rejects_short_signal() {
        let s = sine(5.0, 256.0, 10);
        let cfg = RollingConfig { window: 64, stride: 1 };
        assert!(matches!(
            rolling_moment(&s, &cfg, Moment::Mean),
            Err(Error::InsufficientLength { .. })
        ));
    }

    #[test]
    fn kurtosis_of_gaussian_noise_is_near_zero() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..20_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let s = Signal::new(samples, 256.0).unwrap();
        let cfg = RollingConfig { window: 20_000, stride: 1 };
        let d = rolling_moment(&s, &cfg, Moment::Kurtosis).unwrap();
        assert!(d.values[0].abs() < 0.1, "excess kurtosis {}", d.values[0]);
    }

    #[test]
    fn hjorth_of_pure_sinusoid_is_one() {
        let s = sine(4.0, 256.0, 512);
        let cfg = RollingConfig::default();
        let d = hjorth_complexity(&s, &cfg).unwrap();
        for &v in &d.values {
            assert!((v - 1.0).abs() < 0.05, "complexity {v}");
        }
    }

    #[test]
    fn hjorth_of_white_noise_exceeds_one() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..512).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = Signal::new(samples, 256.0).unwrap();
        let d = hjorth_complexity(&s, &RollingConfig::default()).unwrap();
        let mean = d.values.iter().sum::<f64>() / d.values.len() as f64;
        assert!(mean > 1.0, "mean complexity {mean}");
    }

    #[test]
    fn hjorth_of_constant_window_is_flagged_zero() {
        let s = Signal::new(vec![3.0; 80], 256.0).unwrap();
        let d = hjorth_complexity(&s, &RollingConfig { window: 8, stride: 1 }).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
        assert_eq!(d.degenerate.len(), d.values.len());
    }

    #[test]
    fn bandpass_translation_covariance_away_from_transient() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let base: Vec<f64> = (0..2048).map(|_| StandardNormal.sample(&mut rng)).collect();
        let k = 100;
        let full = bandpass_power(&Signal::new(base.clone(), 256.0).unwrap(), &BandSpec::alpha())
            .unwrap();
        let shifted =
            bandpass_power(&Signal::new(base[k..].to_vec(), 256.0).unwrap(), &BandSpec::alpha())
                .unwrap();
        // Compare once the shifted run's own startup has washed out.
        for i in 1000..shifted.values.len() {
            let (a, b) = (full.values[i + k], shifted.values[i]);
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-9), "index {i}: {a} vs {b}");
        }
    }

    proptest! {
        // Rolling features are translation-covariant: dropping the first k
        // samples drops exactly the first k outputs.
        #[test]
        fn rolling_translation_covariance(k in 1usize..40, seed in 0u64..1000) {
            use rand::SeedableRng;
            use rand_distr::{Distribution, StandardNormal};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let base: Vec<f64> = (0..160).map(|_| StandardNormal.sample(&mut rng)).collect();
            let cfg = RollingConfig { window: 16, stride: 1 };
            let full = rolling_moment(&Signal::new(base.clone(), 256.0).unwrap(), &cfg, Moment::Variance).unwrap();
            let shifted = rolling_moment(&Signal::new(base[k..].to_vec(), 256.0).unwrap(), &cfg, Moment::Variance).unwrap();
            prop_assert_eq!(&full.values[k..], &shifted.values[..]);
        }
    }
}
