//! Offline changepoint detection over feature diagnostic sequences.
//!
//! Per feature the detector forms an exponentially weighted average of the
//! diagnostic sequence, takes lagged differences, and flags indices whose
//! deviation from the sequence mean exceeds a multiple of its standard
//! deviation. A density rule keeps only excursions sustained across most of
//! a lag-sized neighborhood, after which feature-specific changepoints are
//! merged and thinned to a minimum separation.

use crate::error::{Error, Result};
use crate::signal::{
    bandpass_power, hjorth_complexity, rolling_moment, BandSpec, DiagnosticSequence, Moment,
    RollingConfig, Signal,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Detector parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangepointConfig {
    /// Forgetting factor of the exponentially weighted average, in (0, 1).
    pub lambda: f64,
    /// Lag of the difference sequence, in samples.
    pub kappa: usize,
    /// Threshold multiplier on the standard deviation.
    pub sigma_mult: f64,
    /// Fraction of a lag-sized neighborhood that must exceed the threshold
    /// for a candidate to be confirmed, in (0, 1].
    pub density: f64,
    /// Minimum distance between reported changepoints, in samples.
    pub min_separation: usize,
    /// Leading lagged-difference entries excluded from the mean/std
    /// estimate (EWMA startup and residual filter transients).
    pub warmup: usize,
}

impl Default for ChangepointConfig {
    fn default() -> Self {
        Self {
            lambda: 0.9,
            kappa: 16,
            sigma_mult: 4.0,
            density: 0.7,
            min_separation: 256,
            warmup: 64,
        }
    }
}

impl ChangepointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be in (0, 1), got {}",
                self.lambda
            )));
        }
        if self.kappa < 1 {
            return Err(Error::InvalidConfig("kappa must be >= 1".into()));
        }
        if self.sigma_mult.is_nan() || self.sigma_mult <= 0.0 {
            return Err(Error::InvalidConfig("sigma_mult must be > 0".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density must be in (0, 1], got {}",
                self.density
            )));
        }
        if self.min_separation < 1 {
            return Err(Error::InvalidConfig("min_separation must be >= 1".into()));
        }
        Ok(())
    }
}

/// Exponentially weighted average of a diagnostic sequence together with
/// its normalizing weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EwmaSequence {
    pub values: Vec<f64>,
    /// Geometric weight sums; start at 1 and increase toward 1/(1-lambda).
    pub normalizers: Vec<f64>,
}

/// Lagged differences of an EWMA sequence. `values[j]` pairs EWMA entries
/// `j + kappa` and `j`, so it sits at offset `kappa` in diagnostic
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedDiffSequence {
    pub values: Vec<f64>,
    pub start_offset: usize,
}

/// Merged, separation-filtered changepoints in original-signal coordinates.
///
/// `per_feature` keeps each feature's confirmed changepoints (also in
/// original coordinates) before the cross-feature merge and filter.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ChangepointSet {
    pub indices: Vec<usize>,
    pub per_feature: BTreeMap<String, Vec<usize>>,
}

/// JSON-facing report: the changepoint set plus the sampling rate and the
/// configuration that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ChangepointReport {
    pub fs: f64,
    pub indices: Vec<usize>,
    pub per_feature: BTreeMap<String, Vec<usize>>,
    pub config: ChangepointConfig,
}

impl ChangepointReport {
    pub fn new(set: ChangepointSet, fs: f64, config: ChangepointConfig) -> Self {
        Self {
            fs,
            indices: set.indices,
            per_feature: set.per_feature,
            config,
        }
    }
}

/// A diagnostic-sequence feature the detector can run on.
#[derive(Debug, Clone, PartialEq)]
pub enum Feature {
    BandPower(BandSpec),
    Moment(Moment),
    HjorthComplexity,
}

impl Feature {
    pub fn label(&self) -> String {
        match self {
            Feature::BandPower(band) => format!("{}_power", band.name),
            Feature::Moment(m) => match m {
                Moment::Mean => "mean".into(),
                Moment::Variance => "variance".into(),
                Moment::Kurtosis => "kurtosis".into(),
            },
            Feature::HjorthComplexity => "hjorth_complexity".into(),
        }
    }

    /// The default EEG feature set: theta/alpha/beta band power, Hjorth
    /// complexity, variance, mean and kurtosis.
    pub fn default_set() -> Vec<Feature> {
        vec![
            Feature::BandPower(BandSpec::theta()),
            Feature::BandPower(BandSpec::alpha()),
            Feature::BandPower(BandSpec::beta()),
            Feature::HjorthComplexity,
            Feature::Moment(Moment::Variance),
            Feature::Moment(Moment::Mean),
            Feature::Moment(Moment::Kurtosis),
        ]
    }

    fn diagnostic(&self, signal: &Signal, rolling: &RollingConfig) -> Result<DiagnosticSequence> {
        match self {
            Feature::BandPower(band) => bandpass_power(signal, band),
            Feature::Moment(m) => rolling_moment(signal, rolling, *m),
            Feature::HjorthComplexity => hjorth_complexity(signal, rolling),
        }
    }
}

/// Exponentially weighted average with a forgetting factor.
///
/// The first output equals the first input; later outputs are the
/// geometrically weighted mean of everything seen so far, computed by the
/// O(n) incremental form.
pub fn ewma(diag: &DiagnosticSequence, lambda: f64) -> Result<EwmaSequence> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be in (0, 1), got {lambda}"
        )));
    }
    if diag.values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut values = Vec::with_capacity(diag.values.len());
    let mut normalizers = Vec::with_capacity(diag.values.len());
    let mut w = 1.0;
    let mut v = diag.values[0];
    values.push(v);
    normalizers.push(w);
    for &x in &diag.values[1..] {
        w = lambda * w + 1.0;
        // v_n = v_{n-1} + (x_n - v_{n-1}) / w_n; keeps constant inputs exact.
        v += (x - v) / w;
        values.push(v);
        normalizers.push(w);
    }
    Ok(EwmaSequence { values, normalizers })
}

/// Differences of EWMA values `kappa` samples apart.
pub fn lagged_diff(ewma: &EwmaSequence, kappa: usize) -> Result<LaggedDiffSequence> {
    if kappa < 1 {
        return Err(Error::InvalidConfig("kappa must be >= 1".into()));
    }
    if ewma.values.len() <= kappa {
        return Err(Error::InsufficientLength {
            needed: kappa + 1,
            got: ewma.values.len(),
        });
    }
    let values = ewma
        .values
        .windows(kappa + 1)
        .map(|w| w[kappa] - w[0])
        .collect();
    Ok(LaggedDiffSequence {
        values,
        start_offset: kappa,
    })
}

fn excursion_stats(ld: &LaggedDiffSequence, warmup: usize) -> Result<(f64, f64)> {
    if ld.values.len() < warmup + 2 {
        return Err(Error::InsufficientLength {
            needed: warmup + 2,
            got: ld.values.len(),
        });
    }
    let tail = &ld.values[warmup..];
    let n = tail.len() as f64;
    let mean = tail.iter().sum::<f64>() / n;
    let var = tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Indices whose absolute deviation from the sequence mean exceeds
/// `sigma_mult` standard deviations (two-sided). Mean and standard
/// deviation are the unweighted statistics of the whole sequence minus its
/// first `warmup` entries; candidates start at the warmup boundary too,
/// since the EWMA startup would otherwise register as a sustained
/// excursion. A zero standard deviation yields an empty set.
pub fn detect_excursions(
    ld: &LaggedDiffSequence,
    sigma_mult: f64,
    warmup: usize,
) -> Result<Vec<usize>> {
    let (mean, std) = excursion_stats(ld, warmup)?;
    if std == 0.0 {
        return Ok(Vec::new());
    }
    let threshold = sigma_mult * std;
    Ok(ld
        .values
        .iter()
        .enumerate()
        .skip(warmup)
        .filter(|(_, &v)| (v - mean).abs() > threshold)
        .map(|(i, _)| i)
        .collect())
}

/// Keeps a candidate excursion only when at least `density` of the indices
/// within half a lag on each side are themselves above threshold.
pub fn confirm_density(
    candidates: &[usize],
    ld: &LaggedDiffSequence,
    kappa: usize,
    density: f64,
    sigma_mult: f64,
    warmup: usize,
) -> Result<Vec<usize>> {
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let (mean, std) = excursion_stats(ld, warmup)?;
    if std == 0.0 {
        return Ok(Vec::new());
    }
    let threshold = sigma_mult * std;
    let above: Vec<bool> = ld.values.iter().map(|&v| (v - mean).abs() > threshold).collect();
    let half = kappa.div_ceil(2);
    let last = ld.values.len() - 1;
    Ok(candidates
        .iter()
        .copied()
        .filter(|&c| c <= last)
        .filter(|&c| {
            let lo = c.saturating_sub(half);
            let hi = (c + half).min(last);
            let window = hi - lo + 1;
            let need = (density * window as f64).ceil() as usize;
            let count = above[lo..=hi].iter().filter(|&&b| b).count();
            count >= need
        })
        .collect())
}

/// Translates each feature's confirmed indices into original-signal
/// coordinates, unions them, and greedily keeps indices left to right such
/// that kept neighbors are at least `min_separation` apart.
pub fn merge_and_filter(
    per_feature: &BTreeMap<String, Vec<usize>>,
    min_separation: usize,
    offsets: &BTreeMap<String, usize>,
) -> ChangepointSet {
    let mut translated: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for (feature, indices) in per_feature {
        let offset = offsets.get(feature).copied().unwrap_or(0);
        let shifted: Vec<usize> = indices.iter().map(|&i| i + offset).collect();
        union.extend(shifted.iter().copied());
        translated.insert(feature.clone(), shifted);
    }

    let mut indices = Vec::new();
    let mut last_kept: Option<usize> = None;
    for idx in union {
        let keep = match last_kept {
            None => true,
            Some(prev) => idx - prev >= min_separation,
        };
        if keep {
            indices.push(idx);
            last_kept = Some(idx);
        }
    }

    ChangepointSet {
        indices,
        per_feature: translated,
    }
}

/// Full per-signal detection: diagnostic sequences for every feature, EWMA,
/// lagged differences, excursion detection, density confirmation, then the
/// cross-feature merge and separation filter. Rolling features use the
/// default 64-sample window with stride 1.
pub fn detect_changepoints(
    signal: &Signal,
    features: &[Feature],
    cfg: &ChangepointConfig,
) -> Result<ChangepointSet> {
    cfg.validate()?;
    let rolling = RollingConfig::default();
    let mut per_feature: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut offsets: BTreeMap<String, usize> = BTreeMap::new();

    for feature in features {
        let diag = feature.diagnostic(signal, &rolling)?;
        let averaged = ewma(&diag, cfg.lambda)?;
        let ld = lagged_diff(&averaged, cfg.kappa)?;
        // Band-power diagnostics carry a filter startup transient of about
        // 3 / low_hz seconds; widen the warmup so it cannot dominate the
        // threshold statistics or spawn candidates.
        let warmup = match feature {
            Feature::BandPower(band) => {
                let transient = (3.0 * signal.fs() / band.low_hz).ceil() as usize;
                cfg.warmup
                    .max(transient.max(rolling.window).saturating_sub(cfg.kappa))
            }
            _ => cfg.warmup,
        };
        let candidates = detect_excursions(&ld, cfg.sigma_mult, warmup)?;
        let confirmed = confirm_density(
            &candidates,
            &ld,
            cfg.kappa,
            cfg.density,
            cfg.sigma_mult,
            warmup,
        )?;
        offsets.insert(feature.label(), diag.start_offset + cfg.kappa);
        per_feature.insert(feature.label(), confirmed);
    }

    Ok(merge_and_filter(&per_feature, cfg.min_separation, &offsets))
}
