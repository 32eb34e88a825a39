//! Magnitude spectra of sampled records and of the Gaussian fault pulse.
//!
//! A record of `2N` samples is transformed with a `2N`-point DFT and scaled
//! by `T_s`, so that the bins approximate the continuous Fourier transform
//! at `omega_k = pi k / (N T_s)`, `k = 0..=N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::simulate::Waveform;
use crate::xferfn::FrequencyGrid;

/// Default Gaussian spectrum level that marks the fault bandwidth (-40 dB).
pub const DEFAULT_BANDWIDTH_THRESHOLD: f64 = 0.01;

/// `{pi k / (N T_s) : k = 0..=N}`.
pub fn frequency_grid(half_len: usize, sample_interval: f64) -> Result<FrequencyGrid> {
    if half_len == 0 {
        return Err(Error::invalid("N", "must be >= 1"));
    }
    require_positive("T_s", sample_interval)?;
    let denom = half_len as f64 * sample_interval;
    FrequencyGrid::new((0..=half_len).map(|k| PI * k as f64 / denom).collect())
}

/// Per-channel nonnegative magnitudes on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudeSpectrum {
    pub grid: FrequencyGrid,
    pub channels: Vec<Vec<f64>>,
}

impl MagnitudeSpectrum {
    pub fn new(grid: FrequencyGrid, channels: Vec<Vec<f64>>) -> Result<Self> {
        for ch in &channels {
            if ch.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "channel of length {} on a grid of {} points",
                    ch.len(),
                    grid.len()
                )));
            }
            if ch.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
                return Err(Error::invalid("mags", "magnitudes must be finite and >= 0"));
            }
        }
        Ok(Self { grid, channels })
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Uniform bin spacing, or an error if the grid is not `k * spacing`.
    pub fn spacing(&self) -> Result<f64> {
        let w = self.grid.omegas();
        if w.len() < 2 || w[0] != 0.0 {
            return Err(Error::GridMismatch(
                "grid must start at 0 with at least two bins".into(),
            ));
        }
        let step = w[1];
        for (k, &wk) in w.iter().enumerate() {
            let expected = step * k as f64;
            if (wk - expected).abs() > 1e-9 * expected.max(step) {
                return Err(Error::GridMismatch(format!(
                    "bin {k} at {wk} rad/s, expected {expected} for uniform spacing"
                )));
            }
        }
        Ok(step)
    }
}

/// `T_s`-scaled `2N`-point DFT magnitudes of each channel, bins `0..=N`.
///
/// Odd-length records are zero-padded by one sample.
pub fn magnitude_spectrum(waveform: &Waveform) -> MagnitudeSpectrum {
    let ts = waveform.sample_interval();
    let samples = waveform.samples();
    let len = samples.len() + samples.len() % 2;
    let half = len / 2;

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let channels = (0..2)
        .map(|c| {
            let mut buf: Vec<Complex64> = samples.iter().map(|s| Complex64::new(s[c], 0.0)).collect();
            buf.resize(len, Complex64::new(0.0, 0.0));
            fft.process(&mut buf);
            buf[..=half].iter().map(|z| z.norm() * ts).collect()
        })
        .collect();

    let grid = frequency_grid(half, ts).expect("waveform invariants give a valid grid");
    MagnitudeSpectrum { grid, channels }
}

/// `|U(j omega)| = exp(-omega^2 sigma^2 / 2)` for the unit-area Gaussian pulse.
pub fn gaussian_magnitude(sigma: f64, grid: &FrequencyGrid) -> Result<MagnitudeSpectrum> {
    require_positive("sigma", sigma)?;
    let mags = grid
        .omegas()
        .iter()
        .map(|w| (-0.5 * (w * sigma).powi(2)).exp())
        .collect();
    MagnitudeSpectrum::new(grid.clone(), vec![mags])
}

/// Frequency at which the Gaussian spectrum falls to `threshold`.
pub fn fault_bandwidth(sigma: f64, threshold: f64) -> Result<f64> {
    require_positive("sigma", sigma)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    Ok((-2.0 * threshold.ln()).sqrt() / sigma)
}

/// Pulse width whose spectrum falls to `threshold` at `omega_f`.
pub fn pulse_width_for_bandwidth(omega_f: f64, threshold: f64) -> Result<f64> {
    require_positive("omega_f", omega_f)?;
    fault_bandwidth(omega_f, threshold)
}
