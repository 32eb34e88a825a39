//! Magnitude least-squares fault localisation.
//!
//! The cost compares measured output magnitudes with the model prediction
//! `|H_i(j w_k; l)| |U(j w_k)|` over the sampled grid up to a cut-off:
//!
//! ```text
//! J(l) = sum_k sum_i w_i (|Y_i(j w_k)| - |H_i(j w_k; l)| |U(j w_k)|)^2
//! ```
//!
//! Taking magnitudes removes the unknown fault onset time. `J` is roughly
//! even in `l`, so the optimiser may run unconstrained and the sign of the
//! minimiser is dropped.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_finite, require_positive, Error, Result};
use crate::model::NondimensionalSystem;
use crate::spectrum::{
    gaussian_magnitude, pulse_width_for_bandwidth, MagnitudeSpectrum, DEFAULT_BANDWIDTH_THRESHOLD,
};
use crate::xferfn::{critical_frequency, transfer_function, CriticalFrequency, CriticalFrequencyOptions};

/// Hard cap on cost evaluations per localisation.
pub const MAX_EVALUATIONS: usize = 10_000;
/// Golden-section refinement stops once the bracket is narrower than this (m).
pub const DISTANCE_TOLERANCE: f64 = 0.01;
/// Bracket expansion gives up beyond this distance (m).
pub const MAX_DISTANCE: f64 = 1e7;

const AUTO_SWEEP_POINTS: usize = 64;
const AUTO_SWEEP_RANGE: (f64, f64) = (10.0, 1e5);
const GOLDEN: f64 = 1.618_033_988_749_895;
const INV_GOLDEN: f64 = 0.618_033_988_749_895;

/// Knobs for [`CostFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostOptions {
    /// Highest frequency included in the sum; `None` uses the whole grid.
    pub omega_cut: Option<f64>,
    /// Per-channel weights on the squared residuals.
    pub channel_weights: [f64; 2],
}

impl Default for CostOptions {
    fn default() -> Self {
        Self {
            omega_cut: None,
            channel_weights: [1.0, 1.0],
        }
    }
}

/// Precomputed least-squares cost for one measured spectrum.
#[derive(Debug, Clone)]
pub struct CostFunction {
    sys: NondimensionalSystem,
    omegas: Vec<f64>,
    measured: Vec<[f64; 2]>,
    input: Vec<f64>,
    weights: [f64; 2],
    omega_cut: f64,
}

impl CostFunction {
    pub fn new(
        measured: &MagnitudeSpectrum,
        sys: &NondimensionalSystem,
        sigma: f64,
        options: CostOptions,
    ) -> Result<Self> {
        if measured.n_channels() != 2 {
            return Err(Error::invalid(
                "measured",
                format!("expected 2 channels, got {}", measured.n_channels()),
            ));
        }
        measured.spacing()?;
        let top = measured.grid.last();
        let omega_cut = options.omega_cut.unwrap_or(top);
        if !(omega_cut.is_finite() && omega_cut >= 0.0) {
            return Err(Error::invalid(
                "omega_cut",
                format!("must be >= 0, got {omega_cut}"),
            ));
        }
        if omega_cut > top * (1.0 + 1e-12) {
            return Err(Error::GridMismatch(format!(
                "omega_cut {omega_cut} rad/s exceeds the top grid frequency {top} rad/s"
            )));
        }
        for (i, w) in options.channel_weights.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::invalid(
                    "channel_weights",
                    format!("weight {i} must be >= 0, got {w}"),
                ));
            }
        }

        let count = measured
            .grid
            .omegas()
            .iter()
            .take_while(|&&w| w <= omega_cut)
            .count();
        let omegas = measured.grid.omegas()[..count].to_vec();
        let input = gaussian_magnitude(sigma, &measured.grid)?.channels.swap_remove(0);
        Ok(Self {
            sys: *sys,
            measured: (0..count)
                .map(|k| [measured.channel(0)[k], measured.channel(1)[k]])
                .collect(),
            input: input[..count].to_vec(),
            omegas,
            weights: options.channel_weights,
            omega_cut,
        })
    }

    pub fn omega_cut(&self) -> f64 {
        self.omega_cut
    }

    /// Frequency band actually summed over.
    pub fn band(&self) -> (f64, f64) {
        (
            self.omegas.first().copied().unwrap_or(0.0),
            self.omegas.last().copied().unwrap_or(0.0),
        )
    }

    /// `J(ell)`.
    pub fn evaluate(&self, ell: f64) -> Result<f64> {
        require_finite("ell", ell)?;
        let mut total = 0.0;
        for ((&w, y), u) in self.omegas.iter().zip(&self.measured).zip(&self.input) {
            let h = transfer_function(w, &self.sys, ell)?;
            for c in 0..2 {
                let r = y[c] - h[c].norm() * u;
                total += self.weights[c] * r * r;
            }
        }
        Ok(total)
    }

    /// Evaluates `J` on every grid distance, in parallel, preserving order.
    pub fn sweep(&self, ells: &[f64]) -> Result<CostCurve> {
        if ells.is_empty() {
            return Err(Error::invalid("ell_grid", "distance grid is empty"));
        }
        let costs = ells
            .par_iter()
            .map(|&l| self.evaluate(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(CostCurve {
            ells: ells.to_vec(),
            costs,
        })
    }

    /// Minimises `J` and reports `|l|` at the minimum.
    pub fn localize(&self, start: InitialGuess) -> Result<EstimateResult> {
        let mut search = Search::new(self);
        let outcome = match start {
            InitialGuess::Auto => search.auto(),
            InitialGuess::From(ell) => {
                require_finite("init_ell", ell)?;
                search.from(ell)
            }
        };
        let (best_ell, best_cost, converged) = outcome?;
        Ok(EstimateResult {
            ell_hat: best_ell.abs(),
            cost_at_min: best_cost,
            iterations: search.iterations,
            evaluations: search.evaluations,
            band_used: self.band(),
            converged,
        })
    }
}

/// `J(ell)` for a single distance; see [`CostFunction`] for repeated use.
pub fn cost(
    ell: f64,
    measured: &MagnitudeSpectrum,
    sys: &NondimensionalSystem,
    sigma: f64,
    omega_cut: Option<f64>,
) -> Result<f64> {
    let options = CostOptions {
        omega_cut,
        ..CostOptions::default()
    };
    CostFunction::new(measured, sys, sigma, options)?.evaluate(ell)
}

/// `J` sampled over a distance grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostCurve {
    pub ells: Vec<f64>,
    pub costs: Vec<f64>,
}

impl CostCurve {
    /// Index of the smallest cost (first one on ties).
    pub fn argmin(&self) -> usize {
        self.costs
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
            )
            .0
    }

    /// `(max - min) / mean`; small values mean the curve carries no distance information.
    pub fn spread(&self) -> f64 {
        let max = self.costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.costs.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = self.costs.iter().sum::<f64>() / self.costs.len() as f64;
        (max - min) / mean
    }

    /// Number of strict interior local minima.
    pub fn local_minima(&self) -> usize {
        self.costs
            .windows(3)
            .filter(|w| w[1] < w[0] && w[1] < w[2])
            .count()
    }
}

/// Start of the distance search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    /// Coarse logarithmic sweep over 10 m to 100 km, then golden-section refinement.
    Auto,
    /// Downhill bracket expansion from a single starting distance.
    From(f64),
}

/// Output of [`CostFunction::localize`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub ell_hat: f64,
    pub cost_at_min: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub band_used: (f64, f64),
    pub converged: bool,
}

struct Search<'a> {
    cost: &'a CostFunction,
    evaluations: usize,
    iterations: usize,
    best: (f64, f64),
}

impl<'a> Search<'a> {
    fn new(cost: &'a CostFunction) -> Self {
        Self {
            cost,
            evaluations: 0,
            iterations: 0,
            best: (0.0, f64::INFINITY),
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= MAX_EVALUATIONS
    }

    // NaN costs (overflow far outside the physical range) count as +inf.
    fn eval(&mut self, ell: f64) -> Result<f64> {
        self.evaluations += 1;
        let j = self.cost.evaluate(ell)?;
        let j = if j.is_nan() { f64::INFINITY } else { j };
        if j < self.best.1 {
            self.best = (ell, j);
        }
        Ok(j)
    }

    fn finish(&self, converged: bool) -> Result<(f64, f64, bool)> {
        Ok((self.best.0, self.best.1, converged))
    }

    fn auto(&mut self) -> Result<(f64, f64, bool)> {
        let (lo, hi) = AUTO_SWEEP_RANGE;
        let ratio = (hi / lo).ln() / (AUTO_SWEEP_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..AUTO_SWEEP_POINTS)
            .map(|i| lo * (ratio * i as f64).exp())
            .collect();
        let mut costs = Vec::with_capacity(grid.len());
        for &l in &grid {
            costs.push(self.eval(l)?);
        }
        let i = costs
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
            )
            .0;
        let left = if i == 0 { 0.0 } else { grid[i - 1] };
        if i + 1 == grid.len() {
            // Minimum at the far edge: not bracketed.
            self.golden(left, grid[i])?;
            return self.finish(false);
        }
        let converged = self.golden(left, grid[i + 1])?;
        self.finish(converged)
    }

    fn from(&mut self, start: f64) -> Result<(f64, f64, bool)> {
        let step = 0.1 * start.abs().max(10.0);
        let (mut a, mut b) = (start, start + step);
        let (mut fa, mut fb) = (self.eval(a)?, self.eval(b)?);
        if fb > fa {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        let mut c = b + GOLDEN * (b - a);
        let mut fc = self.eval(c)?;
        while fc <= fb {
            if self.exhausted() || c.abs() > MAX_DISTANCE {
                return self.finish(false);
            }
            a = b;
            b = c;
            fb = fc;
            c = b + GOLDEN * (b - a);
            fc = self.eval(c)?;
        }
        let converged = self.golden(a.min(c), a.max(c))?;
        self.finish(converged)
    }

    /// Golden-section search on `[lo, hi]`; true when the bracket shrinks below tolerance.
    fn golden(&mut self, mut lo: f64, mut hi: f64) -> Result<bool> {
        let mut x1 = hi - INV_GOLDEN * (hi - lo);
        let mut x2 = lo + INV_GOLDEN * (hi - lo);
        let mut f1 = self.eval(x1)?;
        let mut f2 = self.eval(x2)?;
        while hi - lo >= DISTANCE_TOLERANCE {
            if self.exhausted() {
                return Ok(false);
            }
            self.iterations += 1;
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_GOLDEN * (hi - lo);
                f1 = self.eval(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_GOLDEN * (hi - lo);
                f2 = self.eval(x2)?;
            }
        }
        Ok(true)
    }
}

/// Sensor and fault-profile bandwidths for reliable localisation beyond a distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthAdvice {
    pub omega_star: f64,
    pub omega_f_recommended: f64,
    pub omega_b_recommended: f64,
    pub sigma_recommended: f64,
    pub sample_interval_recommended: f64,
}

/// Fault bandwidth is set a decade above the critical frequency at `ell_min`,
/// and the sensor Nyquist rate a further decade above that.
pub fn advise_bandwidth(sys: &NondimensionalSystem, ell_min: f64) -> Result<BandwidthAdvice> {
    require_positive("ell_min", ell_min)?;
    let options = CriticalFrequencyOptions {
        omega_max: 1e12,
        ..CriticalFrequencyOptions::default()
    };
    let omega_star = match critical_frequency(sys, ell_min, &options)? {
        CriticalFrequency::Found(w) => w,
        CriticalFrequency::BeyondSweepRange => {
            return Err(Error::invalid(
                "ell_min",
                format!("no critical frequency below {} rad/s", options.omega_max),
            ))
        }
    };
    let omega_f = 10.0 * omega_star;
    let omega_b = 10.0 * omega_f;
    Ok(BandwidthAdvice {
        omega_star,
        omega_f_recommended: omega_f,
        omega_b_recommended: omega_b,
        sigma_recommended: pulse_width_for_bandwidth(omega_f, DEFAULT_BANDWIDTH_THRESHOLD)?,
        sample_interval_recommended: std::f64::consts::PI / omega_b,
    })
}
