//! Thin wrapper over rustfft with preplanned forward/inverse transforms.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Preplanned forward/inverse FFT pair for one transform length.
pub(crate) struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    /// Forward DFT of a real series.
    pub fn forward(&self, x: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse DFT, normalized by 1/n, keeping the real part.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.n);
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }
}

/// Two-sided amplitude spectrum |DFT(x)|.
pub(crate) fn amplitude_spectrum(x: &[f64]) -> Vec<f64> {
    FftPair::new(x.len())
        .forward(x)
        .into_iter()
        .map(|c| c.norm())
        .collect()
}
