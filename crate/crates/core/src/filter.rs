//! Butterworth bandpass design and second-order-section filtering.
//!
//! The design path mirrors the classic analog-prototype route: Butterworth
//! lowpass poles, lowpass-to-bandpass transform, bilinear transform with
//! frequency pre-warping, then pairing into cascaded second-order sections.
//! Filtering is causal (forward only). [`sosfilt_stepinit`] additionally
//! initializes the section states as if the first sample had been held
//! constant forever before the record starts, which removes the startup
//! transient that a zero initial state would inject into every diagnostic
//! sequence.

use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;

/// One second-order section; denominator is `1 + a[0] z^-1 + a[1] z^-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sos {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Sos {
    /// DC gain of this section.
    fn gain_at_dc(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }
}

/// Designs a Butterworth bandpass filter of the given order as cascaded
/// second-order sections, matching the bilinear-transform design used by
/// standard DSP toolboxes.
pub fn butter_bandpass(order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Result<Vec<Sos>> {
    let nyquist = fs / 2.0;
    if !(low_hz > 0.0 && high_hz > low_hz && high_hz < nyquist) {
        return Err(Error::InvalidBand {
            low_hz,
            high_hz,
            nyquist_hz: nyquist,
        });
    }
    if order == 0 {
        return Err(Error::InvalidConfig("filter order must be >= 1".into()));
    }

    // Analog Butterworth lowpass prototype: unit-gain, poles on the left
    // unit semicircle.
    let proto: Vec<Complex64> = (0..order)
        .map(|k| {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    // Pre-warp the band edges so the bilinear transform lands them exactly.
    let fs2 = 2.0; // normalized internal rate, edges expressed vs Nyquist
    let warp = |f_hz: f64| 2.0 * fs2 * (PI * (f_hz / nyquist) / fs2).tan();
    let (w1, w2) = (warp(low_hz), warp(high_hz));
    let bw = w2 - w1;
    let wo = (w1 * w2).sqrt();

    // Lowpass -> bandpass: each prototype pole splits in two; `order` zeros
    // appear at s = 0; passband gain scales by bw^order.
    let mut poles = Vec::with_capacity(2 * order);
    for &p in &proto {
        let half = p * (bw / 2.0);
        let disc = (half * half - Complex64::new(wo * wo, 0.0)).sqrt();
        poles.push(half + disc);
        poles.push(half - disc);
    }
    let k_analog = bw.powi(order as i32);

    // Bilinear transform: zeros at s=0 map to z=1, the excess `order` zeros
    // at infinity map to z=-1.
    let fs_x2 = 2.0 * fs2;
    let mut num = Complex64::new(1.0, 0.0);
    let mut den = Complex64::new(1.0, 0.0);
    let z_poles: Vec<Complex64> = poles
        .iter()
        .map(|&p| {
            den *= fs_x2 - p;
            (fs_x2 + p) / (fs_x2 - p)
        })
        .collect();
    // `order` analog zeros at 0 contribute (fs_x2 - 0) each to the gain.
    num *= Complex64::new(fs_x2.powi(order as i32), 0.0);
    let k_digital = k_analog * (num / den).re;

    Ok(pair_sections(&z_poles, k_digital))
}

/// Pairs the 2n bandpass poles into n sections, assigning one z=+1 and one
/// z=-1 zero to each (numerator z^2 - 1) and the full gain to the first.
fn pair_sections(z_poles: &[Complex64], gain: f64) -> Vec<Sos> {
    const IM_TOL: f64 = 1e-10;
    let mut complex_reps: Vec<Complex64> = z_poles.iter().copied().filter(|p| p.im > IM_TOL).collect();
    let mut reals: Vec<f64> = z_poles
        .iter()
        .filter(|p| p.im.abs() <= IM_TOL)
        .map(|p| p.re)
        .collect();
    complex_reps.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut sections = Vec::new();
    for p in complex_reps {
        sections.push(Sos {
            b: [1.0, 0.0, -1.0],
            a: [-2.0 * p.re, p.norm_sqr()],
        });
    }
    // Real poles always come in even counts for a bandpass (conjugate
    // symmetry of the full set); fold them pairwise.
    for pair in reals.chunks(2) {
        let (r1, r2) = (pair[0], pair[1]);
        sections.push(Sos {
            b: [1.0, 0.0, -1.0],
            a: [-(r1 + r2), r1 * r2],
        });
    }
    if let Some(first) = sections.first_mut() {
        for b in &mut first.b {
            *b *= gain;
        }
    }
    sections
}

/// Causal second-order-section filtering (direct form II transposed),
/// starting from zero state.
pub fn sosfilt(sos: &[Sos], x: &[f64]) -> Vec<f64> {
    run(sos, x, vec![[0.0; 2]; sos.len()])
}

/// Causal filtering with the state initialized to the steady-state response
/// of a constant input equal to `x[0]`. Equivalent to extending the signal
/// into the infinite past with its first value, so a constant input yields
/// the constant steady-state output from sample 0.
pub fn sosfilt_stepinit(sos: &[Sos], x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut state = Vec::with_capacity(sos.len());
    let mut step_in = x[0];
    for s in sos {
        let h1 = s.gain_at_dc();
        state.push([
            step_in * (h1 - s.b[0]),
            step_in * (s.b[2] - s.a[1] * h1),
        ]);
        step_in *= h1;
    }
    run(sos, x, state)
}

fn run(sos: &[Sos], x: &[f64], mut state: Vec<[f64; 2]>) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for &sample in x {
        let mut v = sample;
        for (s, z) in sos.iter().zip(state.iter_mut()) {
            let y = s.b[0] * v + z[0];
            z[0] = s.b[1] * v + z[1] - s.a[0] * y;
            z[1] = s.b[2] * v - s.a[1] * y;
            v = y;
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_input(n: usize, fs: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64;
                (2.0 * PI * 10.0 * t / fs).sin()
                    + 0.5 * (2.0 * PI * 3.0 * t / fs + 0.7).sin()
                    + 0.25 * (2.0 * PI * 40.0 * t / fs + 1.3).sin()
            })
            .collect()
    }

    // Reference outputs computed with an independent SciPy implementation
    // (butter + sosfilt_zi + sosfilt) on the same input.
    const REF_IDX: [usize; 5] = [50, 100, 200, 300, 511];
    const THETA_REF: [f64; 5] = [
        0.19101953763672921,
        -0.09526028864644019,
        -0.04791531013541693,
        -0.0779604262839279,
        0.021379263861011924,
    ];
    const ALPHA_REF: [f64; 5] = [
        -0.12303127552946834,
        -0.7062683435801709,
        -0.9524773994824056,
        -0.8701694604401325,
        -0.5332821906936224,
    ];
    const BETA_REF: [f64; 5] = [
        -0.26175121299508763,
        -0.1632484410894706,
        -0.14440680577776052,
        -0.06761232769991132,
        -0.13861704523791352,
    ];

    fn assert_matches_reference(low: f64, high: f64, reference: &[f64; 5]) {
        let x = test_input(512, 256.0);
        let sos = butter_bandpass(5, low, high, 256.0).unwrap();
        let y = sosfilt_stepinit(&sos, &x);
        for (&i, &want) in REF_IDX.iter().zip(reference) {
            let got = y[i];
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                "band {low}-{high} index {i}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn matches_scipy_reference_theta() {
        assert_matches_reference(4.0, 8.0, &THETA_REF);
    }

    #[test]
    fn matches_scipy_reference_alpha() {
        assert_matches_reference(8.0, 12.0, &ALPHA_REF);
    }

    #[test]
    fn matches_scipy_reference_beta() {
        assert_matches_reference(12.0, 30.0, &BETA_REF);
    }

    #[test]
    fn constant_input_yields_zero_output_with_stepinit() {
        let sos = butter_bandpass(5, 4.0, 8.0, 256.0).unwrap();
        let x = vec![5.0; 512];
        let y = sosfilt_stepinit(&sos, &x);
        for (i, &v) in y.iter().enumerate() {
            assert!(v.abs() < 1e-12, "index {i}: {v}");
        }
    }

    #[test]
    fn center_frequency_passes_at_unit_gain() {
        let fs = 256.0;
        let f0 = (8.0f64 * 12.0).sqrt();
        let sos = butter_bandpass(5, 8.0, 12.0, fs).unwrap();
        let x: Vec<f64> = (0..8192).map(|i| (2.0 * PI * f0 * i as f64 / fs).sin()).collect();
        let y = sosfilt_stepinit(&sos, &x);
        let peak = y[4096..].iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!((peak - 1.0).abs() < 0.01, "steady amplitude {peak}");
    }

    #[test]
    fn rejects_band_outside_nyquist() {
        assert!(matches!(
            butter_bandpass(5, 8.0, 200.0, 256.0),
            Err(Error::InvalidBand { .. })
        ));
        assert!(matches!(
            butter_bandpass(5, 0.0, 8.0, 256.0),
            Err(Error::InvalidBand { .. })
        ));
        assert!(matches!(
            butter_bandpass(5, 12.0, 8.0, 256.0),
            Err(Error::InvalidBand { .. })
        ));
    }

    #[test]
    fn zero_input_zero_output() {
        let sos = butter_bandpass(5, 4.0, 8.0, 256.0).unwrap();
        let y = sosfilt(&sos, &vec![0.0; 64]);
        assert!(y.iter().all(|&v| v == 0.0));
    }
}
