//! End-to-end augmentation recipes.
//!
//! EEG: detect changepoints per channel, split the signal there, run the
//! fixed-edges engine on each quasi-stationary sub-segment and concatenate
//! the results. ECG: detect and gap-fill peaks, run the fixed-points engine
//! over the whole record, then apply the peak-preserving smoothing.

use crate::changepoint::{detect_changepoints, ChangepointConfig, ChangepointSet, Feature};
use crate::error::{Error, Result};
use crate::iaaft::{
    iaaft_fixed_edges, iaaft_fixed_points, smooth_preserving_peaks, IaaftConfig, SurrogateSet,
};
use crate::peaks::{detect_peaks, fill_gaps, FixedIndexSet, PeakConfig};
use crate::signal::Signal;
use serde::Serialize;

/// Which recipe to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Eeg,
    Ecg,
}

/// Sub-segments shorter than this are copied verbatim instead of being fed
/// to the constrained engine (a 10% edge margin of under 2 samples makes it
/// degenerate).
pub const MIN_VIABLE_SEGMENT: usize = 20;

/// Standard deviation of the ECG post-smoothing Gaussian.
pub const ECG_SMOOTHING_SIGMA: f64 = 5.0;

/// One augmentation job: one or more equal-length channels plus the
/// detector and engine configurations.
#[derive(Debug, Clone)]
pub struct AugmentationRequest {
    pub channels: Vec<Signal>,
    pub mode: Mode,
    pub changepoint_cfg: ChangepointConfig,
    pub peak_cfg: PeakConfig,
    pub iaaft_cfg: IaaftConfig,
}

impl AugmentationRequest {
    fn validate(&self) -> Result<()> {
        let first = self.channels.first().ok_or(Error::EmptyInput)?;
        for (i, ch) in self.channels.iter().enumerate().skip(1) {
            if ch.len() != first.len() {
                return Err(Error::ChannelMismatch {
                    channel: i,
                    reason: format!("length {} differs from channel 0 ({})", ch.len(), first.len()),
                });
            }
            if ch.fs() != first.fs() {
                return Err(Error::ChannelMismatch {
                    channel: i,
                    reason: format!("fs {} differs from channel 0 ({})", ch.fs(), first.fs()),
                });
            }
        }
        Ok(())
    }
}

/// Convergence bookkeeping for one sub-segment (the whole record for ECG).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentDiagnostics {
    pub start: usize,
    pub end: usize,
    pub copied_verbatim: bool,
    /// Per surrogate.
    pub iterations_used: Vec<usize>,
    /// Per surrogate.
    pub final_spectrum_mse: Vec<f64>,
}

/// What drove the augmentation of one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelProvenance {
    pub channel: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub changepoints: Option<ChangepointSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_indices: Option<FixedIndexSet>,
    pub segments: Vec<SegmentDiagnostics>,
}

/// Surrogates indexed `[surrogate][channel][sample]` plus per-channel
/// provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationResult {
    pub surrogates: Vec<Vec<Vec<f64>>>,
    pub provenance: Vec<ChannelProvenance>,
}

/// Deterministic per-(channel, segment) seed derivation from the base seed,
/// so segments draw independent shuffle streams while the whole result
/// stays reproducible.
pub fn derive_segment_seed(base: u64, channel: usize, segment: usize) -> u64 {
    splitmix64(splitmix64(base ^ (channel as u64).rotate_left(32)) ^ segment as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Segment boundaries `[prev, next)` induced by the changepoints: each
/// changepoint starts a new segment.
fn split_segments(n: usize, changepoints: &[usize]) -> Vec<(usize, usize)> {
    let mut bounds = Vec::with_capacity(changepoints.len() + 2);
    bounds.push(0);
    bounds.extend(changepoints.iter().copied().filter(|&c| c > 0 && c < n));
    bounds.push(n);
    bounds.dedup();
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Changepoint-guided EEG augmentation: per channel, each segment between
/// consecutive changepoints gets its own fixed-edges surrogates, which are
/// concatenated back in order. Segments shorter than
/// [`MIN_VIABLE_SEGMENT`] are copied verbatim.
pub fn augment_eeg(req: &AugmentationRequest) -> Result<AugmentationResult> {
    if req.mode != Mode::Eeg {
        return Err(Error::InvalidConfig("augment_eeg requires mode = eeg".into()));
    }
    req.validate()?;
    req.iaaft_cfg.validate()?;

    let ns = req.iaaft_cfg.n_surrogates;
    let n = req.channels[0].len();
    let mut surrogates = vec![vec![Vec::with_capacity(n); req.channels.len()]; ns];
    let mut provenance = Vec::with_capacity(req.channels.len());

    for (ch_idx, channel) in req.channels.iter().enumerate() {
        let set = detect_changepoints(channel, &Feature::default_set(), &req.changepoint_cfg)?;
        let segments = split_segments(n, &set.indices);
        let mut diagnostics = Vec::with_capacity(segments.len());

        for (seg_idx, &(start, end)) in segments.iter().enumerate() {
            let slice = &channel.samples()[start..end];
            if end - start < MIN_VIABLE_SEGMENT {
                for s in surrogates.iter_mut() {
                    s[ch_idx].extend_from_slice(slice);
                }
                diagnostics.push(SegmentDiagnostics {
                    start,
                    end,
                    copied_verbatim: true,
                    iterations_used: vec![0; ns],
                    final_spectrum_mse: vec![0.0; ns],
                });
                continue;
            }

            let seg_signal = Signal::new(slice.to_vec(), channel.fs())?;
            let seg_cfg = IaaftConfig {
                rng_seed: derive_segment_seed(req.iaaft_cfg.rng_seed, ch_idx, seg_idx),
                ..req.iaaft_cfg.clone()
            };
            let set = iaaft_fixed_edges(&seg_signal, &seg_cfg).map_err(|e| Error::Segment {
                segment: seg_idx,
                start,
                end,
                source: Box::new(e),
            })?;
            for (s, surrogate) in surrogates.iter_mut().zip(&set.surrogates) {
                s[ch_idx].extend_from_slice(surrogate);
            }
            diagnostics.push(SegmentDiagnostics {
                start,
                end,
                copied_verbatim: false,
                iterations_used: set.iterations_used,
                final_spectrum_mse: set.final_spectrum_mse,
            });
        }

        provenance.push(ChannelProvenance {
            channel: ch_idx,
            changepoints: Some(set),
            fixed_indices: None,
            segments: diagnostics,
        });
    }

    Ok(AugmentationResult {
        surrogates,
        provenance,
    })
}

/// Peak-preserving ECG augmentation of a single channel: peak detection,
/// gap filling, fixed-points iAAFT, then Gaussian smoothing that excludes
/// the detected peaks.
pub fn augment_ecg(req: &AugmentationRequest) -> Result<AugmentationResult> {
    if req.mode != Mode::Ecg {
        return Err(Error::InvalidConfig("augment_ecg requires mode = ecg".into()));
    }
    req.validate()?;
    req.iaaft_cfg.validate()?;
    if req.channels.len() != 1 {
        return Err(Error::InvalidConfig(format!(
            "ecg mode takes a single channel, got {}",
            req.channels.len()
        )));
    }

    let channel = &req.channels[0];
    let n = channel.len();
    let peaks = detect_peaks(channel, &req.peak_cfg)?;
    let fixed = fill_gaps(&peaks, n, req.peak_cfg.max_interval)?;
    let engine: SurrogateSet = iaaft_fixed_points(channel, &fixed, &req.iaaft_cfg)?;

    let mut surrogates = Vec::with_capacity(engine.surrogates.len());
    for raw in &engine.surrogates {
        let smoothed = smooth_preserving_peaks(raw, &fixed, ECG_SMOOTHING_SIGMA)?;
        surrogates.push(vec![smoothed]);
    }

    Ok(AugmentationResult {
        surrogates,
        provenance: vec![ChannelProvenance {
            channel: 0,
            changepoints: None,
            fixed_indices: Some(fixed),
            segments: vec![SegmentDiagnostics {
                start: 0,
                end: n,
                copied_verbatim: false,
                iterations_used: engine.iterations_used,
                final_spectrum_mse: engine.final_spectrum_mse,
            }],
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn eeg_request(samples: Vec<f64>, seed: u64) -> AugmentationRequest {
        AugmentationRequest {
            channels: vec![Signal::new(samples, 256.0).unwrap()],
            mode: Mode::Eeg,
            changepoint_cfg: ChangepointConfig::default(),
            peak_cfg: PeakConfig::config_a(),
            iaaft_cfg: IaaftConfig {
                rng_seed: seed,
                ..IaaftConfig::fixed_edges_defaults()
            },
        }
    }

    fn ecg_request(samples: Vec<f64>, cfg: PeakConfig, margin: usize, seed: u64) -> AugmentationRequest {
        AugmentationRequest {
            channels: vec![Signal::new(samples, 256.0).unwrap()],
            mode: Mode::Ecg,
            changepoint_cfg: ChangepointConfig::default(),
            peak_cfg: cfg,
            iaaft_cfg: IaaftConfig {
                point_margin: margin,
                rng_seed: seed,
                ..IaaftConfig::fixed_points_defaults()
            },
        }
    }

    #[test]
    fn split_segments_basic_cases() {
        assert_eq!(split_segments(2000, &[1000]), vec![(0, 1000), (1000, 2000)]);
        assert_eq!(split_segments(500, &[]), vec![(0, 500)]);
        assert_eq!(split_segments(100, &[0, 100]), vec![(0, 100)]);
    }

    #[test]
    fn eeg_without_changepoints_equals_whole_signal_surrogate() {
        // A stationary tone never trips the detector, so the recipe
        // degenerates to one whole-signal fixed-edges surrogate.
        let x: Vec<f64> = (0..3000)
            .map(|i| (2.0 * std::f64::consts::PI * 10.0 * i as f64 / 256.0).sin())
            .collect();
        let req = eeg_request(x.clone(), 7);
        let result = augment_eeg(&req).unwrap();
        assert!(result.provenance[0].changepoints.as_ref().unwrap().indices.is_empty());

        let direct_cfg = IaaftConfig {
            rng_seed: derive_segment_seed(7, 0, 0),
            ..req.iaaft_cfg.clone()
        };
        let direct = iaaft_fixed_edges(&req.channels[0], &direct_cfg).unwrap();
        assert_eq!(result.surrogates[0][0], direct.surrogates[0]);
    }

    #[test]
    fn eeg_pins_edges_around_each_changepoint() {
        // Variance step at 5000 triggers a changepoint near there.
        let x = synth::variance_step(10_000, 5000, 1.0, 5.0, 11);
        let req = eeg_request(x.clone(), 3);
        let result = augment_eeg(&req).unwrap();
        let cps = &result.provenance[0].changepoints.as_ref().unwrap().indices;
        assert!(!cps.is_empty(), "expected a detected changepoint");

        let out = &result.surrogates[0][0];
        assert_eq!(out.len(), x.len());
        let segments = split_segments(x.len(), cps);
        for &(start, end) in &segments {
            let margin = ((end - start) as f64 * 0.1).floor() as usize;
            assert_eq!(&out[start..start + margin], &x[start..start + margin]);
            assert_eq!(&out[end - margin..end], &x[end - margin..end]);
        }
        // Interior of each segment actually changed.
        assert_ne!(out, &x);
    }

    #[test]
    fn eeg_preserves_length_and_is_deterministic() {
        let x = synth::two_regime(4096, 256.0, 6.0, 24.0, 0.3, 5);
        let req = eeg_request(x, 99);
        let a = augment_eeg(&req).unwrap();
        let b = augment_eeg(&req).unwrap();
        assert_eq!(a.surrogates, b.surrogates);
        assert_eq!(a.surrogates[0][0].len(), 4096);
    }

    #[test]
    fn eeg_multi_channel_augments_independently() {
        let a = synth::white_noise(3000, 1);
        let b = synth::white_noise(3000, 2);
        let mut req = eeg_request(a, 5);
        req.channels.push(Signal::new(b, 256.0).unwrap());
        let result = augment_eeg(&req).unwrap();
        assert_eq!(result.surrogates[0].len(), 2);
        assert_ne!(result.surrogates[0][0], result.surrogates[0][1]);
        assert_eq!(result.provenance.len(), 2);
    }

    #[test]
    fn eeg_rejects_mismatched_channels() {
        let mut req = eeg_request(synth::white_noise(3000, 1), 5);
        req.channels
            .push(Signal::new(synth::white_noise(2999, 2), 256.0).unwrap());
        assert!(matches!(
            augment_eeg(&req),
            Err(Error::ChannelMismatch { channel: 1, .. })
        ));
    }

    #[test]
    fn ecg_flat_line_round_trips() {
        let req = ecg_request(vec![0.25; 1000], PeakConfig::config_a(), 5, 1);
        let result = augment_ecg(&req).unwrap();
        let prov = &result.provenance[0];
        let fixed = prov.fixed_indices.as_ref().unwrap();
        assert!(fixed.peak_indices().is_empty());
        assert!(!fixed.is_empty(), "gap fills expected on a flat line");
        for &v in &result.surrogates[0][0] {
            assert!((v - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn ecg_preserves_detected_peaks_exactly() {
        let (x, _) = synth::pulse_train(3000, 180, 12, 3.0, 1.5, 0.05, 77);
        let req = ecg_request(x.clone(), PeakConfig::config_b(), 10, 13);
        let result = augment_ecg(&req).unwrap();
        let out = &result.surrogates[0][0];
        let fixed = result.provenance[0].fixed_indices.as_ref().unwrap();
        let peaks = fixed.peak_indices();
        assert!(!peaks.is_empty());
        for &p in &peaks {
            assert_eq!(out[p], x[p], "peak {p} must be bit-identical");
        }
        assert_eq!(out.len(), x.len());
        assert_ne!(out, &x);
    }

    #[test]
    fn ecg_config_b_pins_at_least_as_many_as_config_a() {
        let (x, _) = synth::pulse_train(3000, 180, 12, 3.0, 1.5, 0.05, 31);
        let count = |cfg: PeakConfig, margin: usize| {
            let req = ecg_request(x.clone(), cfg, margin, 13);
            let result = augment_ecg(&req).unwrap();
            let fixed = result.provenance[0].fixed_indices.clone().unwrap();
            let mut mask = vec![false; x.len()];
            for e in &fixed.entries {
                let lo = e.index.saturating_sub(margin);
                let hi = (e.index + margin + 1).min(x.len());
                for m in &mut mask[lo..hi] {
                    *m = true;
                }
            }
            mask.iter().filter(|&&m| m).count()
        };
        let a = count(PeakConfig::config_a(), 5);
        let b = count(PeakConfig::config_b(), 10);
        assert!(b >= a, "config B pinned {b} < config A pinned {a}");
    }

    #[test]
    fn ecg_rejects_multi_channel() {
        let mut req = ecg_request(synth::white_noise(1000, 1), PeakConfig::config_a(), 5, 1);
        req.channels
            .push(Signal::new(synth::white_noise(1000, 2), 256.0).unwrap());
        assert!(augment_ecg(&req).is_err());
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let mut req = eeg_request(synth::white_noise(3000, 1), 5);
        assert!(augment_ecg(&req).is_err());
        req.mode = Mode::Ecg;
        assert!(augment_eeg(&req).is_err());
    }
}
