//! Single-ended fault localisation on transmission and distribution lines.
//!
//! The line between sensor and fault is modelled by the Telegrapher's
//! equation in per-unit form. Its transfer function is a closed-form 2x2
//! matrix exponential, and the fault distance is found by fitting measured
//! output magnitude spectra to the model in a least-squares sense.
//!
//! * [`model`]: line parameters, per-unit bases, non-dimensional coefficients.
//! * [`xferfn`]: transfer function and critical frequency.
//! * [`simulate`]: synthetic sensor data, by frequency synthesis or PDE solve.
//! * [`spectrum`]: scaled DFT magnitude spectra and the Gaussian pulse spectrum.
//! * [`estimate`]: least-squares cost, sweeps, localisation and bandwidth advice.

pub mod config;
pub mod error;
pub mod estimate;
pub mod model;
pub mod simulate;
pub mod spectrum;
pub mod xferfn;

pub use config::{CaseConfig, Sampling, Simulation};
pub use error::{Error, Result};
pub use estimate::{
    advise_bandwidth, cost, BandwidthAdvice, CostCurve, CostFunction, CostOptions, EstimateResult,
    InitialGuess,
};
pub use model::{
    from_per_unit, nondimensionalise, to_per_unit, BaseQuantities, FaultSpec, LineParameters,
    NondimensionalSystem,
};
pub use simulate::{
    gaussian_pulse_waveform, simulate_pde, synthesize_output, PdeSolver, SpatialState, Waveform,
};
pub use spectrum::{
    fault_bandwidth, frequency_grid, gaussian_magnitude, magnitude_spectrum, MagnitudeSpectrum,
};
pub use xferfn::{
    critical_frequency, magnitude_response, propagation_matrix, transfer_function, ComplexMatrix2,
    CriticalFrequency, CriticalFrequencyOptions, FrequencyGrid, FrequencyResponse,
};
