//! Benchmark-only crate; see the `benches/` directory. Shared input
//! construction lives here so both benchmark binaries agree on workloads.

use surro_core::{FixedIndexSet, Signal};

/// Seeded AR(2) benchmark signal.
pub fn ar2_signal(n: usize) -> Signal {
    Signal::new(surro_core::synth::ar2(n, 0.75, -0.5, 42), 256.0).unwrap()
}

/// Two-regime signal exercising the full EEG recipe.
pub fn two_regime_signal(n: usize) -> Signal {
    Signal::new(
        surro_core::synth::two_regime(n, 256.0, 6.0, 24.0, 0.3, 42),
        256.0,
    )
    .unwrap()
}

/// Pulse train plus its gap-filled fixed-index set under configuration B.
pub fn ecg_workload(n: usize) -> (Signal, FixedIndexSet) {
    let (x, _) = surro_core::synth::pulse_train(n, 180, 12, 3.0, 1.5, 0.05, 42);
    let signal = Signal::new(x, 256.0).unwrap();
    let peaks = surro_core::detect_peaks(&signal, &surro_core::PeakConfig::config_b()).unwrap();
    let fixed = surro_core::fill_gaps(&peaks, signal.len(), 80).unwrap();
    (signal, fixed)
}
