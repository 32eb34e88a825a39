//! Line parameters, per-unit bases and the non-dimensional Telegrapher system.
//!
//! Voltages and currents are scaled by the base quantities `V0` and `I0`, and
//! position along the line is scaled by the (unknown) fault distance. The
//! resulting system reads `l E dz/dt = Gamma dz/dxi - l F z` with the fault
//! imposed at `xi = 1` as `z(t, 1) = B u(t - t_f)`.

use serde::Serialize;

use crate::error::{require_nonnegative, require_positive, Result};

/// Distributed line constants per metre, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineParameters {
    resistance: f64,
    inductance: f64,
    capacitance: f64,
    conductance: f64,
}

impl LineParameters {
    /// Series resistance (Ω/m), inductance (H/m), shunt capacitance (F/m)
    /// and conductance (S/m). `R`, `L`, `C` must be positive, `G` nonnegative.
    pub fn new(resistance: f64, inductance: f64, capacitance: f64, conductance: f64) -> Result<Self> {
        Ok(Self {
            resistance: require_positive("R", resistance)?,
            inductance: require_positive("L", inductance)?,
            capacitance: require_positive("C", capacitance)?,
            conductance: require_nonnegative("G", conductance)?,
        })
    }

    /// Lossless or lossy line without positivity checks on `R`.
    ///
    /// Only `L` and `C` are required to be positive. Used to study the
    /// `R = G = 0` limit, which the regular constructor rejects.
    pub fn with_losses(resistance: f64, inductance: f64, capacitance: f64, conductance: f64) -> Result<Self> {
        Ok(Self {
            resistance: require_nonnegative("R", resistance)?,
            inductance: require_positive("L", inductance)?,
            capacitance: require_positive("C", capacitance)?,
            conductance: require_nonnegative("G", conductance)?,
        })
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    pub fn conductance(&self) -> f64 {
        self.conductance
    }

    /// Lossless wave speed `1/sqrt(LC)` in m/s.
    pub fn wave_speed(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }

    /// One-way travel time over `distance` metres.
    pub fn transit_time(&self, distance: f64) -> f64 {
        distance.abs() * (self.inductance * self.capacitance).sqrt()
    }
}

/// Per-unit base quantities. `R0 = V0 / I0` is computed once and stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseQuantities {
    voltage: f64,
    current: f64,
    resistance: f64,
}

impl BaseQuantities {
    pub fn new(voltage: f64, current: f64) -> Result<Self> {
        let voltage = require_positive("V0", voltage)?;
        let current = require_positive("I0", current)?;
        Ok(Self {
            voltage,
            current,
            resistance: voltage / current,
        })
    }

    pub fn voltage(&self) -> f64 {
        self.voltage
    }

    pub fn current(&self) -> f64 {
        self.current
    }

    /// Base resistance `R0`.
    pub fn resistance(&self) -> f64 {
        self.resistance
    }
}

/// Resistive fault with a Gaussian current profile centred at `onset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaultSpec {
    resistance: f64,
    onset: f64,
    width: f64,
}

impl FaultSpec {
    /// Fault resistance `r` (Ω), onset time `t_f` (s) and pulse width `sigma` (s).
    pub fn new(resistance: f64, onset: f64, width: f64) -> Result<Self> {
        Ok(Self {
            resistance: require_nonnegative("r", resistance)?,
            onset: require_nonnegative("t_f", onset)?,
            width: require_positive("sigma", width)?,
        })
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    pub fn onset(&self) -> f64 {
        self.onset
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Same fault with a different pulse width.
    pub fn with_width(&self, width: f64) -> Result<Self> {
        Self::new(self.resistance, self.onset, width)
    }

    /// Same fault with a different onset time.
    pub fn with_onset(&self, onset: f64) -> Result<Self> {
        Self::new(self.resistance, onset, self.width)
    }
}

/// Coefficients of the non-dimensional system.
///
/// `E` and `F` are diagonal and stored as their diagonals. `Gamma` is the
/// constant antidiagonal matrix with `-1` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NondimensionalSystem {
    e: [f64; 2],
    f: [f64; 2],
    b: [f64; 2],
}

/// `[[0, -1], [-1, 0]]`; involutory.
pub const GAMMA: [[f64; 2]; 2] = [[0.0, -1.0], [-1.0, 0.0]];

impl NondimensionalSystem {
    /// Diagonal of `E = diag(C R0, L / R0)`.
    pub fn e(&self) -> [f64; 2] {
        self.e
    }

    /// Diagonal of `F = diag(G R0, R / R0)`.
    pub fn f(&self) -> [f64; 2] {
        self.f
    }

    /// Fault coupling vector `B = (r / R0, 1)`.
    pub fn b(&self) -> [f64; 2] {
        self.b
    }

    pub fn gamma(&self) -> [[f64; 2]; 2] {
        GAMMA
    }

    /// Ratio of the largest to smallest diagonal entry of `E`.
    pub fn e_condition_number(&self) -> f64 {
        let (lo, hi) = if self.e[0] < self.e[1] {
            (self.e[0], self.e[1])
        } else {
            (self.e[1], self.e[0])
        };
        hi / lo
    }

    /// Transit time over distance `ell` in the scaled coordinates, `|l| sqrt(E11 E22)`.
    pub fn transit_time(&self, ell: f64) -> f64 {
        ell.abs() * (self.e[0] * self.e[1]).sqrt()
    }
}

/// Builds the non-dimensional system for a line, per-unit bases and fault.
pub fn nondimensionalise(
    line: &LineParameters,
    bases: &BaseQuantities,
    fault: &FaultSpec,
) -> NondimensionalSystem {
    let r0 = bases.resistance();
    NondimensionalSystem {
        e: [line.capacitance() * r0, line.inductance() / r0],
        f: [line.conductance() * r0, line.resistance() / r0],
        b: [fault.resistance() / r0, 1.0],
    }
}

/// Scales a physical `(volts, amps)` pair into per-unit values.
pub fn to_per_unit(voltage: f64, current: f64, bases: &BaseQuantities) -> (f64, f64) {
    (voltage / bases.voltage(), current / bases.current())
}

/// Inverse of [`to_per_unit`].
pub fn from_per_unit(z1: f64, z2: f64, bases: &BaseQuantities) -> (f64, f64) {
    (z1 * bases.voltage(), z2 * bases.current())
}
