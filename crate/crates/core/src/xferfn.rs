//! Transfer function of the non-dimensional line, `H(s; l) = exp(-Gamma (F + E s) l) B`.
//!
//! The exponent `M = -Gamma (F + E s) l = [[0, b l], [a l, 0]]` with
//! `a = (G + sC) R0` and `b = (R + sL) / R0` squares to `a b l^2 I`, so
//!
//! ```text
//! exp(M) = cosh(g l) I + sinh(g l)/g [[0, b], [a, 0]],   g = sqrt(a b).
//! ```
//!
//! Both `cosh(g l)` and `sinh(g l)/g` are even in `g`, so the square-root
//! branch does not matter.

use std::ops::Mul;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_finite, Error, Result};
use crate::model::NondimensionalSystem;

/// Below this `|g l|` the hyperbolic functions are replaced by their series.
const SERIES_SWITCH: f64 = 1e-6;

/// Dense complex 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2(pub [[Complex64; 2]; 2]);

impl ComplexMatrix2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn entries(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.0.iter().flatten().copied()
    }
}

impl Mul for ComplexMatrix2 {
    type Output = ComplexMatrix2;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        ComplexMatrix2(out)
    }
}

/// Ordered angular frequencies in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    /// Frequencies must be finite, strictly increasing and start at or above 0.
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::invalid("omegas", "frequency grid is empty"));
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("omegas", "frequencies must be finite"));
        }
        if omegas[0] < 0.0 {
            return Err(Error::invalid(
                "omegas",
                format!("first frequency {} is negative", omegas[0]),
            ));
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "omegas",
                "frequencies must be strictly increasing",
            ));
        }
        Ok(Self { omegas })
    }

    /// `points_per_decade` logarithmically spaced points over `[lo, hi]`, endpoints included.
    pub fn logarithmic(lo: f64, hi: f64, points_per_decade: usize) -> Result<Self> {
        if !(lo.is_finite() && lo > 0.0) {
            return Err(Error::invalid("omega_min", format!("must be > 0, got {lo}")));
        }
        if !(hi.is_finite() && hi > lo) {
            return Err(Error::invalid(
                "omega_max",
                format!("must exceed omega_min, got {hi}"),
            ));
        }
        if points_per_decade == 0 {
            return Err(Error::invalid("points_per_decade", "must be positive"));
        }
        let decades = (hi / lo).log10();
        let steps = (decades * points_per_decade as f64).ceil().max(1.0) as usize;
        let (a, b) = (lo.log10(), hi.log10());
        let omegas = (0..=steps)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64))
            .collect();
        Self::new(omegas)
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.omegas.last().expect("grid is never empty")
    }
}

/// `exp(-Gamma (F + E s) l)` at an arbitrary complex `s`.
///
/// Exposed for analysis of discretised solvers, whose effective Laplace
/// variable leaves the imaginary axis.
pub fn propagation_matrix_at(s: Complex64, sys: &NondimensionalSystem, ell: f64) -> ComplexMatrix2 {
    let [e1, e2] = sys.e();
    let [f1, f2] = sys.f();
    let a = f1 + s * e1;
    let b = f2 + s * e2;
    let theta2 = a * b * (ell * ell);
    let (cosh, sinh_over_g) = if theta2.norm().sqrt() < SERIES_SWITCH {
        series_terms(theta2, ell)
    } else {
        hyperbolic_terms(a * b, ell)
    };
    ComplexMatrix2([[cosh, sinh_over_g * b], [sinh_over_g * a, cosh]])
}

// (cosh(g l), sinh(g l)/g) from g^2.
fn hyperbolic_terms(gamma2: Complex64, ell: f64) -> (Complex64, Complex64) {
    let gamma = gamma2.sqrt();
    let x = gamma * ell;
    (x.cosh(), x.sinh() / gamma)
}

fn series_terms(theta2: Complex64, ell: f64) -> (Complex64, Complex64) {
    let t4 = theta2 * theta2;
    (
        1.0 + theta2 / 2.0 + t4 / 24.0,
        (1.0 + theta2 / 6.0 + t4 / 120.0) * ell,
    )
}

/// `exp(-Gamma (F + j omega E) l)`.
pub fn propagation_matrix(omega: f64, sys: &NondimensionalSystem, ell: f64) -> Result<ComplexMatrix2> {
    require_finite("omega", omega)?;
    require_finite("ell", ell)?;
    Ok(propagation_matrix_at(Complex64::new(0.0, omega), sys, ell))
}

/// `H(j omega; l)` as `(H1, H2)`: per-unit voltage and current at the sensor.
pub fn transfer_function(omega: f64, sys: &NondimensionalSystem, ell: f64) -> Result<[Complex64; 2]> {
    let m = propagation_matrix(omega, sys, ell)?;
    Ok(m.apply(coupling(sys)))
}

/// `H(s; l)` at an arbitrary complex `s`.
pub fn transfer_function_at(s: Complex64, sys: &NondimensionalSystem, ell: f64) -> [Complex64; 2] {
    propagation_matrix_at(s, sys, ell).apply(coupling(sys))
}

fn coupling(sys: &NondimensionalSystem) -> [Complex64; 2] {
    let [b1, b2] = sys.b();
    [Complex64::new(b1, 0.0), Complex64::new(b2, 0.0)]
}

/// `H` sampled over a frequency grid for one fault distance.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub grid: FrequencyGrid,
    pub h1: Vec<Complex64>,
    pub h2: Vec<Complex64>,
    pub ell: f64,
}

impl FrequencyResponse {
    pub fn mag_h1(&self) -> Vec<f64> {
        self.h1.iter().map(|z| z.norm()).collect()
    }

    pub fn mag_h2(&self) -> Vec<f64> {
        self.h2.iter().map(|z| z.norm()).collect()
    }
}

/// Evaluates `H(j omega; l)` over every grid frequency.
pub fn magnitude_response(
    grid: &FrequencyGrid,
    sys: &NondimensionalSystem,
    ell: f64,
) -> Result<FrequencyResponse> {
    require_finite("ell", ell)?;
    let (h1, h2) = grid
        .omegas()
        .iter()
        .map(|&w| transfer_function(w, sys, ell).map(|[a, b]| (a, b)))
        .collect::<Result<(Vec<_>, Vec<_>)>>()?;
    Ok(FrequencyResponse {
        grid: grid.clone(),
        h1,
        h2,
        ell,
    })
}

/// Sweep used to locate the critical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalFrequencyOptions {
    /// Relative deviation from the DC magnitude that counts as "changed".
    pub delta: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points_per_decade: usize,
}

impl Default for CriticalFrequencyOptions {
    fn default() -> Self {
        Self {
            delta: 0.01,
            omega_min: 1.0,
            omega_max: 1e6,
            points_per_decade: 400,
        }
    }
}

/// Outcome of a critical-frequency search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", content = "omega_star_rad_s", rename_all = "snake_case")]
pub enum CriticalFrequency {
    Found(f64),
    /// The response stays within `delta` of its DC value over the whole sweep.
    BeyondSweepRange,
}

impl CriticalFrequency {
    pub fn value(self) -> Option<f64> {
        match self {
            CriticalFrequency::Found(w) => Some(w),
            CriticalFrequency::BeyondSweepRange => None,
        }
    }
}

/// Largest relative deviation of `|H_i(j omega)|` from `|H_i(0)|` over both channels.
pub fn relative_deviation(omega: f64, sys: &NondimensionalSystem, ell: f64) -> Result<f64> {
    let dc = transfer_function(0.0, sys, ell)?;
    let h = transfer_function(omega, sys, ell)?;
    Ok(dc
        .iter()
        .zip(&h)
        .map(|(d, h)| ((h.norm() - d.norm()) / d.norm()).abs())
        .fold(0.0, f64::max))
}

/// First frequency on a logarithmic sweep where either channel's magnitude
/// departs from its DC value by more than `delta` (relative).
pub fn critical_frequency(
    sys: &NondimensionalSystem,
    ell: f64,
    options: &CriticalFrequencyOptions,
) -> Result<CriticalFrequency> {
    if !(ell.is_finite() && ell > 0.0) {
        return Err(Error::invalid("ell", format!("must be > 0, got {ell}")));
    }
    if !(options.delta > 0.0 && options.delta < 1.0) {
        return Err(Error::invalid(
            "delta",
            format!("must lie in (0, 1), got {}", options.delta),
        ));
    }
    let grid = FrequencyGrid::logarithmic(options.omega_min, options.omega_max, options.points_per_decade)?;
    for &w in grid.omegas() {
        if relative_deviation(w, sys, ell)? > options.delta {
            return Ok(CriticalFrequency::Found(w));
        }
    }
    Ok(CriticalFrequency::BeyondSweepRange)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CaseConfig;
    use crate::model::{nondimensionalise, BaseQuantities, FaultSpec, LineParameters};

    fn table1() -> NondimensionalSystem {
        CaseConfig::table1().system()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_distance_is_identity() {
        let sys = table1();
        for w in [0.0, 1.0, 1e4, 1e6] {
            assert_eq!(
                propagation_matrix(w, &sys, 0.0).unwrap(),
                ComplexMatrix2::identity()
            );
        }
    }

    #[test]
    fn dc_is_nilpotent_step() {
        let sys = table1();
        let m = propagation_matrix(0.0, &sys, 2000.0).unwrap();
        let expected = 5.39e-5 * 2000.0 / (220e3 / 454.55);
        assert!(rel(expected, 2.2272e-4) < 1e-4);
        assert_eq!(m.0[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(m.0[1][1], Complex64::new(1.0, 0.0));
        assert_eq!(m.0[1][0], Complex64::new(0.0, 0.0));
        assert!(rel(m.0[0][1].re, expected) < 1e-14);
        assert_eq!(m.0[0][1].im, 0.0);
    }

    #[test]
    fn dc_gain_and_identity_coupling() {
        let sys = table1();
        let h = transfer_function(0.0, &sys, 2000.0).unwrap();
        let exact = (5.0 + 5.39e-5 * 2000.0) / (220e3 / 454.55);
        assert!(rel(h[0].re, exact) < 1e-12);
        assert!(rel(h[0].re, 1.05533e-2) < 2e-5);
        assert_eq!(h[1], Complex64::new(1.0, 0.0));
        let h0 = transfer_function(1234.0, &sys, 0.0).unwrap();
        assert_eq!([h0[0].re, h0[1].re], sys.b());
    }

    #[test]
    fn rejects_non_finite_inputs() {
        let sys = table1();
        assert!(propagation_matrix(f64::NAN, &sys, 1.0).is_err());
        assert!(propagation_matrix(1.0, &sys, f64::INFINITY).is_err());
    }

    #[test]
    fn series_branch_is_continuous() {
        let ell = 3.0;
        for theta in [0.5e-6, 1e-6, 2e-6] {
            for phase in [0.0, 0.7, std::f64::consts::FRAC_PI_2, 2.5] {
                let theta2 = Complex64::from_polar(theta * theta, 2.0 * phase);
                let gamma2 = theta2 / (ell * ell);
                let (c1, s1) = series_terms(theta2, ell);
                let (c2, s2) = hyperbolic_terms(gamma2, ell);
                assert!((c1 - c2).norm() <= 1e-15, "{c1} vs {c2}");
                assert!((s1 - s2).norm() <= 1e-12 * s1.norm(), "{s1} vs {s2}");
            }
        }
    }

    #[test]
    fn magnitude_response_singleton_and_symmetry() {
        let sys = table1();
        let grid = FrequencyGrid::new(vec![0.0]).unwrap();
        let r = magnitude_response(&grid, &sys, 2000.0).unwrap();
        assert!(rel(r.mag_h1()[0], 1.05533e-2) < 2e-5);
        assert_eq!(r.mag_h2()[0], 1.0);
        assert_eq!(r.h1[0].im, 0.0);
        for w in [10.0, 3e3, 7.7e4, 9e5] {
            let p = transfer_function(w, &sys, 2000.0).unwrap();
            let n = transfer_function(-w, &sys, 2000.0).unwrap();
            for (p, n) in p.iter().zip(&n) {
                assert!((p.conj() - n).norm() <= 1e-14 * p.norm());
            }
        }
    }

    #[test]
    fn dc_gains_nearly_independent_of_distance() {
        let sys = table1();
        let grid = FrequencyGrid::new(vec![0.0]).unwrap();
        let dc: Vec<_> = [1000.0, 2000.0, 4000.0]
            .iter()
            .map(|&l| magnitude_response(&grid, &sys, l).unwrap().mag_h1()[0])
            .collect();
        let (lo, hi) = (dc[0], dc[2]);
        assert!((hi - lo) / lo < 0.05, "{dc:?}");
    }

    #[test]
    fn current_channel_flat_below_1e4() {
        let sys = table1();
        let grid = FrequencyGrid::logarithmic(1.0, 1e4, 50).unwrap();
        let r = magnitude_response(&grid, &sys, 2000.0).unwrap();
        assert!(r.mag_h2().iter().all(|m| (m - 1.0).abs() < 0.01));
        // Beyond omega* the current channel bends noticeably.
        let far = transfer_function(1e5, &sys, 2000.0).unwrap();
        assert!((far[1].norm() - 1.0).abs() > 0.1);
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::new(vec![]).is_err());
        assert!(FrequencyGrid::new(vec![-1.0, 0.0]).is_err());
        assert!(FrequencyGrid::new(vec![0.0, 0.0]).is_err());
        let g = FrequencyGrid::logarithmic(1.0, 1e6, 400).unwrap();
        assert_eq!(g.len(), 2401);
        assert!(rel(g.last(), 1e6) < 1e-12);
    }

    #[test]
    fn critical_frequency_errors_and_range() {
        let sys = table1();
        let opts = CriticalFrequencyOptions::default();
        assert!(critical_frequency(&sys, 0.0, &opts).is_err());
        assert!(critical_frequency(&sys, 1.0, &CriticalFrequencyOptions { delta: 1.5, ..opts }).is_err());
        // A 1 cm line stays flat well past 1e3 rad/s.
        let short = CriticalFrequencyOptions {
            omega_max: 1e3,
            ..opts
        };
        assert_eq!(
            critical_frequency(&sys, 0.01, &short).unwrap(),
            CriticalFrequency::BeyondSweepRange
        );
    }

    #[test]
    fn critical_frequency_decreases_with_distance() {
        let sys = table1();
        let opts = CriticalFrequencyOptions::default();
        let w: Vec<f64> = [1000.0, 2000.0, 4000.0]
            .iter()
            .map(|&l| critical_frequency(&sys, l, &opts).unwrap().value().unwrap())
            .collect();
        assert!(w[2] < w[1] && w[1] < w[0], "{w:?}");
        let ratio = w[0] / w[1];
        assert!((1.6..=2.4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn lossless_distance_reflection() {
        let line = LineParameters::with_losses(0.0, 1.3114e-6, 9.1001e-12, 0.0).unwrap();
        let bases = BaseQuantities::new(220e3, 454.55).unwrap();
        let fault = FaultSpec::new(5.0, 0.01, 3.0349e-5).unwrap();
        let sys = nondimensionalise(&line, &bases, &fault);
        for w in [0.0, 1e3, 5e4, 8e5] {
            let p = transfer_function(w, &sys, 1500.0).unwrap();
            let n = transfer_function(w, &sys, -1500.0).unwrap();
            for (p, n) in p.iter().zip(&n) {
                assert!((p.conj() - n).norm() <= 1e-14 * p.norm().max(1.0));
            }
        }
    }
}
