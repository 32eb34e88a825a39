//! Case configuration files.
//!
//! ```toml
//! [line]
//! R = 5.39e-5
//! L = 1.3114e-6
//! C = 9.1001e-12
//! G = 0.0
//!
//! [bases]
//! V0 = 220e3
//! I0 = 454.55
//!
//! [fault]
//! r = 5.0
//! t_f = 0.01
//! sigma = 3.0349e-5
//!
//! [sim]
//! ell_true = 2000.0
//! T_s = 3.141592653589793e-6
//! n_samples = 8192
//! spatial_nodes = 256
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::model::{nondimensionalise, BaseQuantities, FaultSpec, LineParameters, NondimensionalSystem};

/// Reference case: a 220 kV line with a 5 Ω fault 2 km from the sensor.
pub const TABLE1_TOML: &str = r#"# 220 kV line, 5 ohm fault at 2 km, sampled at T_s = pi/1e6 s.

[line]
R = 5.39e-5
L = 1.3114e-6
C = 9.1001e-12
G = 0.0

[bases]
V0 = 220e3
I0 = 454.55

[fault]
r = 5.0
t_f = 0.01
sigma = 3.0349e-5

[sim]
ell_true = 2000.0
T_s = 3.141592653589793e-6
n_samples = 8192
spatial_nodes = 256
"#;

pub const MIN_SPATIAL_NODES: usize = 16;
pub const MIN_SAMPLES: usize = 8;

/// How the sensor samples the line. Known to the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sampling {
    sample_interval: f64,
    n_samples: usize,
}

impl Sampling {
    /// `n_samples` must be a power of two and at least 8.
    pub fn new(sample_interval: f64, n_samples: usize) -> Result<Self> {
        let sample_interval = require_positive("T_s", sample_interval)?;
        if n_samples < MIN_SAMPLES || !n_samples.is_power_of_two() {
            return Err(Error::invalid(
                "n_samples",
                format!("must be a power of two >= {MIN_SAMPLES}, got {n_samples}"),
            ));
        }
        Ok(Self {
            sample_interval,
            n_samples,
        })
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Sensor bandwidth `pi / T_s`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.sample_interval
    }
}

/// Simulation-only settings. `ell_true` is ground truth and never reaches
/// the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Simulation {
    ell_true: f64,
    spatial_nodes: usize,
}

impl Simulation {
    pub fn new(ell_true: f64, spatial_nodes: usize) -> Result<Self> {
        let ell_true = require_nonnegative("ell_true", ell_true)?;
        if spatial_nodes < MIN_SPATIAL_NODES {
            return Err(Error::invalid(
                "spatial_nodes",
                format!("must be >= {MIN_SPATIAL_NODES}, got {spatial_nodes}"),
            ));
        }
        Ok(Self {
            ell_true,
            spatial_nodes,
        })
    }

    pub fn ell_true(&self) -> f64 {
        self.ell_true
    }

    pub fn spatial_nodes(&self) -> usize {
        self.spatial_nodes
    }
}

/// A validated case: line, bases, fault, sampling and simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseConfig {
    pub line: LineParameters,
    pub bases: BaseQuantities,
    pub fault: FaultSpec,
    pub sampling: Sampling,
    pub simulation: Simulation,
}

impl CaseConfig {
    pub fn table1() -> Self {
        Self::from_toml_str(TABLE1_TOML).expect("built-in reference configuration is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::invalid("config", e.message().to_owned()))?;
        raw.validate()
    }

    pub fn system(&self) -> NondimensionalSystem {
        nondimensionalise(&self.line, &self.bases, &self.fault)
    }

    pub fn to_toml_string(&self) -> String {
        let raw = RawConfig::from(self);
        toml::to_string(&raw).expect("config serialises")
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    line: RawLine,
    bases: RawBases,
    fault: RawFault,
    sim: RawSim,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "G", default)]
    g: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBases {
    #[serde(rename = "V0")]
    v0: f64,
    #[serde(rename = "I0")]
    i0: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawFault {
    r: f64,
    t_f: f64,
    sigma: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    ell_true: f64,
    #[serde(rename = "T_s")]
    t_s: f64,
    n_samples: usize,
    spatial_nodes: usize,
}

impl RawConfig {
    fn validate(self) -> Result<CaseConfig> {
        Ok(CaseConfig {
            line: LineParameters::new(self.line.r, self.line.l, self.line.c, self.line.g)?,
            bases: BaseQuantities::new(self.bases.v0, self.bases.i0)?,
            fault: FaultSpec::new(self.fault.r, self.fault.t_f, self.fault.sigma)?,
            sampling: Sampling::new(self.sim.t_s, self.sim.n_samples)?,
            simulation: Simulation::new(self.sim.ell_true, self.sim.spatial_nodes)?,
        })
    }
}

impl From<&CaseConfig> for RawConfig {
    fn from(c: &CaseConfig) -> Self {
        RawConfig {
            line: RawLine {
                r: c.line.resistance(),
                l: c.line.inductance(),
                c: c.line.capacitance(),
                g: c.line.conductance(),
            },
            bases: RawBases {
                v0: c.bases.voltage(),
                i0: c.bases.current(),
            },
            fault: RawFault {
                r: c.fault.resistance(),
                t_f: c.fault.onset(),
                sigma: c.fault.width(),
            },
            sim: RawSim {
                ell_true: c.simulation.ell_true(),
                t_s: c.sampling.sample_interval(),
                n_samples: c.sampling.n_samples(),
                spatial_nodes: c.simulation.spatial_nodes(),
            },
        }
    }
}
