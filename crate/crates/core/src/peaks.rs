//! R-peak detection and adaptive gap filling.
//!
//! Peaks are detected on the signal and on its negation so both upright and
//! inverted complexes qualify, then merged under a minimum-distance rule.
//! Where the spacing between surviving peaks exceeds a maximum interval,
//! interpolated fill points bound the unconstrained stretches; the signal
//! boundaries act as virtual anchors so leading and trailing gaps are
//! covered too.

use crate::error::{Error, Result};
use crate::signal::Signal;
use serde::Serialize;

/// Peak-detector parameters. Configuration A uses `min_distance` 50 /
/// `max_interval` 150, configuration B 60 / 80.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakConfig {
    /// Minimum spacing between retained peaks, in samples.
    pub min_distance: usize,
    /// Largest allowed gap between consecutive fixed indices, in samples.
    pub max_interval: usize,
    /// Qualification threshold: a local maximum must rise at least this
    /// far above the signal mean and have at least this much prominence.
    /// `None` uses half the signal's standard deviation.
    pub prominence: Option<f64>,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self::config_a()
    }
}

impl PeakConfig {
    /// min_distance 50 samples, max_interval 150 samples.
    pub fn config_a() -> Self {
        Self {
            min_distance: 50,
            max_interval: 150,
            prominence: None,
        }
    }

    /// min_distance 60 samples, max_interval 80 samples.
    pub fn config_b() -> Self {
        Self {
            min_distance: 60,
            max_interval: 80,
            prominence: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_distance < 1 {
            return Err(Error::InvalidConfig("min_distance must be >= 1".into()));
        }
        if self.max_interval < 2 {
            return Err(Error::InvalidConfig("max_interval must be >= 2".into()));
        }
        Ok(())
    }
}

/// Why a sample is pinned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedKind {
    DetectedPeak,
    GapFill,
}

/// One pinned sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedIndex {
    pub index: usize,
    pub kind: FixedKind,
}

/// Sorted, unique set of pinned sample indices with their origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct FixedIndexSet {
    pub entries: Vec<FixedIndex>,
}

impl FixedIndexSet {
    /// Builds a set of detected peaks from sorted-or-not indices.
    pub fn from_peaks(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self {
            entries: indices
                .into_iter()
                .map(|index| FixedIndex {
                    index,
                    kind: FixedKind::DetectedPeak,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All pinned indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }

    /// Indices of detected peaks only (no gap fills).
    pub fn peak_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.kind == FixedKind::DetectedPeak)
            .map(|e| e.index)
            .collect()
    }
}

/// Strict local maxima; flat-topped plateaus report their middle sample.
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    if x.len() < 3 {
        return peaks;
    }
    let i_max = x.len() - 1;
    let mut i = 1;
    while i < i_max {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < i_max && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
            }
        }
        i += 1;
    }
    peaks
}

/// Prominence of a peak: its height above the higher of the two base
/// minima found walking outward until a taller sample or the array edge.
fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    let mut i = peak;
    while i > 0 && x[i - 1] <= h {
        i -= 1;
        if x[i] < left_min {
            left_min = x[i];
        }
    }
    let mut right_min = h;
    let mut i = peak;
    while i + 1 < x.len() && x[i + 1] <= h {
        i += 1;
        if x[i] < right_min {
            right_min = x[i];
        }
    }
    h - left_min.max(right_min)
}

/// Greedy minimum-distance thinning: peaks are visited in descending
/// saliency (ties by ascending index) and each survivor knocks out every
/// unvisited peak strictly closer than `min_distance`.
fn enforce_min_distance(candidates: &[(usize, f64)], min_distance: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[b]
            .1
            .partial_cmp(&candidates[a].1)
            .unwrap()
            .then(candidates[a].0.cmp(&candidates[b].0))
    });
    let mut keep = vec![true; candidates.len()];
    for &j in &order {
        if !keep[j] {
            continue;
        }
        let here = candidates[j].0;
        for (k, cand) in candidates.iter().enumerate() {
            if k != j && cand.0.abs_diff(here) < min_distance {
                keep[k] = false;
            }
        }
    }
    let mut kept: Vec<usize> = candidates
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(c, _)| c.0)
        .collect();
    kept.sort_unstable();
    kept
}

/// Candidate peaks of one polarity: local maxima whose height (in the
/// mean-centered scan array) and prominence both reach the threshold. The
/// height test suppresses baseline plateaus, which sit between genuine
/// peaks of the opposite polarity and would otherwise qualify on
/// prominence alone.
fn scan(x: &[f64], min_distance: usize, threshold: f64) -> Vec<usize> {
    let candidates: Vec<(usize, f64)> = local_maxima(x)
        .into_iter()
        .filter(|&p| x[p] >= threshold && prominence(x, p) >= threshold)
        .map(|p| (p, x[p]))
        .collect();
    enforce_min_distance(&candidates, min_distance)
}

/// Detects upright and inverted peaks and merges them under the
/// minimum-distance rule, preferring the peak farther from the signal
/// mean (so the detector is invariant to a constant baseline shift).
pub fn detect_peaks(signal: &Signal, cfg: &PeakConfig) -> Result<FixedIndexSet> {
    cfg.validate()?;
    let x = signal.samples();
    if x.len() < 3 {
        return Err(Error::InsufficientLength {
            needed: 3,
            got: x.len(),
        });
    }

    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let threshold = cfg.prominence.unwrap_or(0.5 * std);

    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let negated: Vec<f64> = centered.iter().map(|v| -v).collect();

    let upright = scan(&centered, cfg.min_distance, threshold);
    let inverted = scan(&negated, cfg.min_distance, threshold);

    let mut merged: Vec<(usize, f64)> = upright
        .into_iter()
        .chain(inverted)
        .map(|p| (p, centered[p].abs()))
        .collect();
    merged.sort_unstable_by_key(|&(p, _)| p);
    merged.dedup_by_key(|&mut (p, _)| p);

    Ok(FixedIndexSet::from_peaks(enforce_min_distance(
        &merged,
        cfg.min_distance,
    )))
}

/// Inserts equidistant gap-fill indices wherever consecutive pinned
/// indices (with the signal boundaries as virtual anchors) are more than
/// `max_interval` apart. Idempotent.
pub fn fill_gaps(peaks: &FixedIndexSet, n: usize, max_interval: usize) -> Result<FixedIndexSet> {
    if n < 1 {
        return Err(Error::EmptyInput);
    }
    if max_interval < 2 {
        return Err(Error::InvalidConfig("max_interval must be >= 2".into()));
    }
    if let Some(last) = peaks.entries.last() {
        if last.index >= n {
            return Err(Error::IndexOutOfRange {
                index: last.index,
                len: n,
            });
        }
    }

    let mut anchors: Vec<usize> = Vec::with_capacity(peaks.len() + 2);
    anchors.push(0);
    anchors.extend(peaks.entries.iter().map(|e| e.index));
    anchors.push(n - 1);
    anchors.dedup();

    let mut entries = peaks.entries.clone();
    for pair in anchors.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let gap = b - a;
        if gap <= max_interval {
            continue;
        }
        let k = gap.div_ceil(max_interval) - 1;
        let spacing = gap as f64 / (k + 1) as f64;
        for j in 1..=k {
            entries.push(FixedIndex {
                index: (a as f64 + j as f64 * spacing).round() as usize,
                kind: FixedKind::GapFill,
            });
        }
    }
    entries.sort_by_key(|e| e.index);
    entries.dedup_by_key(|e| e.index);
    Ok(FixedIndexSet { entries })
}
