//! Seeded synthetic signal generators used by tests, benchmarks and the
//! acceptance suite. Every generator is a pure function of its arguments,
//! so a (parameters, seed) pair always reproduces the same series.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal white noise.
pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

/// AR(2) process x_t = phi1 x_{t-1} + phi2 x_{t-2} + e_t with unit-variance
/// Gaussian innovations.
pub fn ar2(n: usize, phi1: f64, phi2: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut x = Vec::with_capacity(n);
    let (mut prev1, mut prev2) = (0.0, 0.0);
    for _ in 0..n {
        let e: f64 = StandardNormal.sample(&mut r);
        let v = phi1 * prev1 + phi2 * prev2 + e;
        x.push(v);
        prev2 = prev1;
        prev1 = v;
    }
    x
}

/// White noise whose standard deviation jumps from `sigma_before` to
/// `sigma_after` at `step_at`.
pub fn variance_step(
    n: usize,
    step_at: usize,
    sigma_before: f64,
    sigma_after: f64,
    seed: u64,
) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let sigma = if i < step_at { sigma_before } else { sigma_after };
            let z: f64 = StandardNormal.sample(&mut r);
            sigma * z
        })
        .collect()
}

/// Two spectral regimes: a tone at `f_low` Hz for the first half and a tone
/// at `f_high` Hz for the second half, plus additive Gaussian noise.
pub fn two_regime(n: usize, fs: f64, f_low: f64, f_high: f64, noise_std: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let switch = n / 2;
    (0..n)
        .map(|i| {
            let f = if i < switch { f_low } else { f_high };
            let z: f64 = StandardNormal.sample(&mut r);
            (2.0 * PI * f * i as f64 / fs).sin() + noise_std * z
        })
        .collect()
}

/// ECG-like pulse train: narrow positive Gaussian bumps of the given
/// amplitude roughly every `period` samples (with uniform jitter), on a
/// Gaussian noise floor. Returns the signal and the true apex indices.
pub fn pulse_train(
    n: usize,
    period: usize,
    jitter: usize,
    width: f64,
    amplitude: f64,
    noise_std: f64,
    seed: u64,
) -> (Vec<f64>, Vec<usize>) {
    let mut r = rng(seed);
    let mut x: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut r);
            noise_std * z
        })
        .collect();
    let mut apexes = Vec::new();
    let mut center = period / 2;
    while center < n {
        apexes.push(center);
        let half = (5.0 * width) as isize;
        let c = center as isize;
        for i in (c - half).max(0)..=(c + half).min(n as isize - 1) {
            let d = (i - c) as f64;
            x[i as usize] += amplitude * (-d * d / (2.0 * width * width)).exp();
        }
        let j = if jitter > 0 {
            r.gen_range(0..=2 * jitter) as isize - jitter as isize
        } else {
            0
        };
        center = (center as isize + period as isize + j).max(center as isize + 1) as usize;
    }
    (x, apexes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(white_noise(100, 7), white_noise(100, 7));
        assert_ne!(white_noise(100, 7), white_noise(100, 8));
        assert_eq!(ar2(64, 0.75, -0.5, 1), ar2(64, 0.75, -0.5, 1));
    }

    #[test]
    fn variance_step_changes_spread() {
        let x = variance_step(4000, 2000, 1.0, 5.0, 3);
        let std = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|s| (s - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        };
        assert!(std(&x[2000..]) > 3.0 * std(&x[..2000]));
    }

    #[test]
    fn pulse_train_places_apexes() {
        let (x, apexes) = pulse_train(2000, 180, 10, 3.0, 1.5, 0.05, 9);
        assert!(!apexes.is_empty());
        for &a in &apexes {
            assert!(x[a] > 1.0, "apex {a} value {}", x[a]);
        }
    }
}
