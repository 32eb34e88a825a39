//! Synthetic sensor data.
//!
//! Two independent generators are provided:
//!
//! * [`synthesize_output`] builds `Y = H e^{-s t_f} U` on the DFT grid and
//!   inverse-transforms it. This is exact up to sampling and serves as the
//!   reference.
//! * [`PdeSolver`] integrates the non-dimensional line equations in time.
//!   Each backward-Euler step turns the PDE into a linear ODE in `xi`, which
//!   is integrated with RK4 from the fault boundary `xi = 1`, where the full
//!   state `B u` is known, down to the sensor at `xi = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::config::MIN_SPATIAL_NODES;
use crate::error::{require_finite, require_nonnegative, require_positive, Error, Result};
use crate::model::NondimensionalSystem;
use crate::xferfn::transfer_function;

/// Guard used by the PDE solver to detect blow-up.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Relative level the synthesised response must decay to at the record edges.
pub const WRAPAROUND_TOLERANCE: f64 = 1e-9;

/// Gaussian half-width, in `sigma`, beyond which the pulse is below
/// [`WRAPAROUND_TOLERANCE`] of its peak: `sqrt(2 ln 1e9)`.
const EDGE_WIDTHS: f64 = 6.44;

/// Uniformly sampled per-unit `(voltage, current)` record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Waveform {
    sample_interval: f64,
    start_time: f64,
    samples: Vec<[f64; 2]>,
}

impl Waveform {
    pub fn new(sample_interval: f64, start_time: f64, samples: Vec<[f64; 2]>) -> Result<Self> {
        require_positive("T_s", sample_interval)?;
        require_finite("start_time", start_time)?;
        if samples.len() < 2 {
            return Err(Error::invalid(
                "samples",
                format!("need at least 2 samples, got {}", samples.len()),
            ));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", "samples must be finite"));
        }
        Ok(Self {
            sample_interval,
            start_time,
            samples,
        })
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn samples(&self) -> &[[f64; 2]] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.sample_interval
    }

    pub fn channel(&self, index: usize) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(move |s| s[index])
    }

    /// Largest absolute sample over both channels.
    pub fn peak(&self) -> f64 {
        self.samples.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same samples circularly rotated by `shift` positions (later in time).
    pub fn rotated(&self, shift: usize) -> Waveform {
        let mut samples = self.samples.clone();
        let n = samples.len();
        samples.rotate_right(shift % n);
        Waveform {
            samples,
            ..self.clone()
        }
    }

    pub fn scaled(&self, factor: f64) -> Waveform {
        Waveform {
            samples: self
                .samples
                .iter()
                .map(|[a, b]| [a * factor, b * factor])
                .collect(),
            ..self.clone()
        }
    }
}

/// Sampled Gaussian fault profile and whether the record clips it.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPulse {
    pub samples: Vec<f64>,
    pub truncation: Option<PulseTruncation>,
}

/// Non-fatal diagnostic: the pulse extends past the record within `6 sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseTruncation {
    pub onset: f64,
    pub width: f64,
    pub record_length: f64,
}

/// Samples `u(t_k - t_f)` at `t_k = k T_s`, with `u` the unit-area Gaussian.
pub fn gaussian_pulse_waveform(
    sigma: f64,
    t_f: f64,
    sample_interval: f64,
    n: usize,
) -> Result<GaussianPulse> {
    require_positive("sigma", sigma)?;
    require_finite("t_f", t_f)?;
    require_positive("T_s", sample_interval)?;
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 samples, got {n}")));
    }
    let peak = 1.0 / (sigma * (2.0 * PI).sqrt());
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * sample_interval - t_f;
            peak * (-0.5 * (t / sigma).powi(2)).exp()
        })
        .collect();

    let record_length = n as f64 * sample_interval;
    let truncation = (t_f < 6.0 * sigma || t_f > record_length - 6.0 * sigma).then(|| {
        log::warn!(
            "Gaussian pulse (t_f = {t_f} s, sigma = {sigma} s) is truncated by a {record_length} s record"
        );
        PulseTruncation {
            onset: t_f,
            width: sigma,
            record_length,
        }
    });
    Ok(GaussianPulse { samples, truncation })
}

/// Sensor output for a Gaussian fault, synthesised through `H(s; l)`.
///
/// Evaluates `Y(j w) = H(j w; l) e^{-j w t_f} e^{-w^2 sigma^2 / 2}` on the
/// `n`-point DFT grid and inverse-transforms it. Fails if the response has
/// not decayed to [`WRAPAROUND_TOLERANCE`] of its peak at both ends of the
/// record, which would alias it around the circular transform.
pub fn synthesize_output(
    sys: &NondimensionalSystem,
    ell: f64,
    t_f: f64,
    sigma: f64,
    sample_interval: f64,
    n: usize,
) -> Result<Waveform> {
    require_finite("ell", ell)?;
    require_nonnegative("t_f", t_f)?;
    require_positive("sigma", sigma)?;
    require_positive("T_s", sample_interval)?;
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::invalid("n", format!("must be even and >= 4, got {n}")));
    }

    // The line response to an impulse at t_f is supported on [t_f - tau, t_f + tau];
    // the Gaussian falls below the tolerance beyond EDGE_WIDTHS sigma.
    let reach = sys.transit_time(ell) + EDGE_WIDTHS * sigma;
    if t_f < reach {
        return Err(Error::invalid(
            "t_f",
            format!("response starts before the record: need t_f >= {reach} s, got {t_f} s"),
        ));
    }
    let support_end = t_f + reach;
    if support_end > (n - 1) as f64 * sample_interval {
        let required = ((support_end / sample_interval).ceil() as usize + 1).next_power_of_two();
        return Err(Error::RecordTooShort {
            n_samples: n,
            required,
        });
    }

    let half = n / 2;
    let d_omega = 2.0 * PI / (n as f64 * sample_interval);
    let mut spectra = vec![vec![Complex64::new(0.0, 0.0); n]; 2];
    for k in 0..=half {
        let w = k as f64 * d_omega;
        let h = transfer_function(w, sys, ell)?;
        let gain = Complex64::from_polar((-0.5 * (w * sigma).powi(2)).exp(), -w * t_f);
        for (c, spec) in spectra.iter_mut().enumerate() {
            let y = h[c] * gain;
            if k == 0 || k == half {
                // DC and Nyquist bins of a real record are real.
                spec[k] = Complex64::new(y.re, 0.0);
            } else {
                spec[k] = y;
                spec[n - k] = y.conj();
            }
        }
    }

    let mut planner = FftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(n);
    let scale = 1.0 / (n as f64 * sample_interval);
    for spec in spectra.iter_mut() {
        ifft.process(spec);
    }
    let samples: Vec<[f64; 2]> = (0..n)
        .map(|m| [spectra[0][m].re * scale, spectra[1][m].re * scale])
        .collect();

    Waveform::new(sample_interval, 0.0, samples)
}

/// Uniform grid on `[0, 1]` with a 2-vector per node.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialState {
    xi_nodes: Vec<f64>,
    z_values: Vec<[f64; 2]>,
}

impl SpatialState {
    pub fn zeros(nodes: usize) -> Self {
        let last = (nodes - 1) as f64;
        Self {
            xi_nodes: (0..nodes).map(|j| j as f64 / last).collect(),
            z_values: vec![[0.0; 2]; nodes],
        }
    }

    pub fn xi_nodes(&self) -> &[f64] {
        &self.xi_nodes
    }

    pub fn z_values(&self) -> &[[f64; 2]] {
        &self.z_values
    }

    /// Value at the sensor, `xi = 0`.
    pub fn sensor(&self) -> [f64; 2] {
        self.z_values[0]
    }

    /// Value at the fault, `xi = 1`.
    pub fn fault(&self) -> [f64; 2] {
        self.z_values[self.z_values.len() - 1]
    }
}

/// Backward-Euler / RK4-in-space integrator for a single run.
///
/// Per step, `dz/dxi = Gamma l (E/dt + F) z - Gamma l (E/dt) z_prev(xi)`
/// is integrated from `z(1) = B u_k` to `xi = 0`.
#[derive(Debug, Clone)]
pub struct PdeSolver {
    // Diagonals of l(E/dt + F) and l E/dt; Gamma swaps and negates.
    implicit: [f64; 2],
    history: [f64; 2],
    coupling: [f64; 2],
    sample_interval: f64,
    state: SpatialState,
    previous: Vec<[f64; 2]>,
    steps: usize,
}

impl PdeSolver {
    pub fn new(
        sys: &NondimensionalSystem,
        ell: f64,
        sample_interval: f64,
        spatial_nodes: usize,
    ) -> Result<Self> {
        require_finite("ell", ell)?;
        require_positive("T_s", sample_interval)?;
        if spatial_nodes < MIN_SPATIAL_NODES {
            return Err(Error::invalid(
                "spatial_nodes",
                format!("must be >= {MIN_SPATIAL_NODES}, got {spatial_nodes}"),
            ));
        }
        let (e, f) = (sys.e(), sys.f());
        Ok(Self {
            implicit: [
                ell * (e[0] / sample_interval + f[0]),
                ell * (e[1] / sample_interval + f[1]),
            ],
            history: [ell * e[0] / sample_interval, ell * e[1] / sample_interval],
            coupling: sys.b(),
            sample_interval,
            state: SpatialState::zeros(spatial_nodes),
            previous: vec![[0.0; 2]; spatial_nodes],
            steps: 0,
        })
    }

    pub fn state(&self) -> &SpatialState {
        &self.state
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    // Gamma diag(p, q) z = (-q z2, -p z1).
    fn rhs(&self, z: [f64; 2], prev: [f64; 2]) -> [f64; 2] {
        [
            -(self.implicit[1] * z[1] - self.history[1] * prev[1]),
            -(self.implicit[0] * z[0] - self.history[0] * prev[0]),
        ]
    }

    /// Advances one time step with boundary input `u` and returns the sensor value.
    pub fn step(&mut self, u: f64) -> Result<[f64; 2]> {
        std::mem::swap(&mut self.previous, &mut self.state.z_values);
        let nodes = self.previous.len();
        let h = -1.0 / (nodes - 1) as f64;

        let mut z = [self.coupling[0] * u, self.coupling[1] * u];
        self.state.z_values[nodes - 1] = z;
        for j in (0..nodes - 1).rev() {
            let p0 = self.previous[j + 1];
            let p1 = self.previous[j];
            let pm = [0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1])];

            let k1 = self.rhs(z, p0);
            let k2 = self.rhs(axpy(z, 0.5 * h, k1), pm);
            let k3 = self.rhs(axpy(z, 0.5 * h, k2), pm);
            let k4 = self.rhs(axpy(z, h, k3), p1);
            z = [
                z[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                z[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            let magnitude = z[0].abs().max(z[1].abs());
            if magnitude.is_nan() || magnitude > DIVERGENCE_LIMIT {
                return Err(Error::Diverged {
                    step: self.steps,
                    magnitude,
                });
            }
            self.state.z_values[j] = z;
        }
        self.steps += 1;
        Ok(z)
    }
}

fn axpy(z: [f64; 2], a: f64, k: [f64; 2]) -> [f64; 2] {
    [z[0] + a * k[0], z[1] + a * k[1]]
}

/// Runs [`PdeSolver`] over a boundary input sequence `u_k = u(k T_s - t_f)`.
///
/// The line starts at rest; the first step advances from the zero state.
pub fn simulate_pde(
    sys: &NondimensionalSystem,
    ell: f64,
    input: &[f64],
    sample_interval: f64,
    spatial_nodes: usize,
) -> Result<Waveform> {
    if input.len() < 2 {
        return Err(Error::invalid(
            "input",
            format!("need at least 2 samples, got {}", input.len()),
        ));
    }
    if input.iter().any(|u| !u.is_finite()) {
        return Err(Error::invalid("input", "input samples must be finite"));
    }
    let mut solver = PdeSolver::new(sys, ell, sample_interval, spatial_nodes)?;
    let samples = input
        .iter()
        .map(|&u| solver.step(u))
        .collect::<Result<Vec<_>>>()?;
    Waveform::new(sample_interval, 0.0, samples)
}
