//! Shared fixtures for the benchmarks.

use faultloc_core::{
    magnitude_spectrum, synthesize_output, CaseConfig, MagnitudeSpectrum, NondimensionalSystem,
};

/// Reference case and its model-exact measured spectrum at the true distance.
pub fn reference_measurement() -> (CaseConfig, NondimensionalSystem, MagnitudeSpectrum) {
    let config = CaseConfig::table1();
    let sys = config.system();
    let waveform = synthesize_output(
        &sys,
        config.simulation.ell_true(),
        config.fault.onset(),
        config.fault.width(),
        config.sampling.sample_interval(),
        config.sampling.n_samples(),
    )
    .expect("reference case synthesises");
    let spectrum = magnitude_spectrum(&waveform);
    (config, sys, spectrum)
}
