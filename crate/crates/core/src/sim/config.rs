use serde::{Deserialize, Serialize};

use crate::error::{FieldError, Result};
use crate::model::ModelParams;

pub const DEFAULT_LENGTH: f64 = 50.0;
pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_DURATION: f64 = 100.0;
pub const DEFAULT_RECORD_STRIDE: usize = 10;
pub const DEFAULT_IC_AMPLITUDE: f64 = 0.1;
/// History ring budget in bytes.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Initial field at t = 0. The history before t = 0 is filled with the same
/// field, constant in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InitialCondition {
    /// `v0 + U(-amplitude, amplitude)` independently per grid point.
    RandomUniform { amplitude: f64 },
    /// `v0 + amplitude cos(k x)`, with `k` snapped to the nearest wavenumber
    /// `2πm/L`, `m >= 1`, that fits the periodic domain.
    SingleMode { k: f64, amplitude: f64 },
    /// Spatially constant field; `None` means `v0`.
    Constant { value: Option<f64> },
    /// One value per grid point.
    Explicit { values: Vec<f64> },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::RandomUniform {
            amplitude: DEFAULT_IC_AMPLITUDE,
        }
    }
}

/// How transmission delays enter the drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMode {
    /// Distance over speed, interpolated from the history ring.
    #[default]
    Delayed,
    /// All delays zero: the convolution reads the current field.
    Instantaneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Domain length; the grid is periodic on `[0, L)`.
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    /// Total integrated time.
    pub duration: f64,
    pub seed: u64,
    pub initial: InitialCondition,
    /// Steps between recorded samples.
    pub record_stride: usize,
    /// Time discarded before metrics; `None` means half the duration.
    pub warmup: Option<f64>,
    pub delay_mode: DelayMode,
    pub memory_budget: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            length: DEFAULT_LENGTH,
            points: DEFAULT_POINTS,
            dt: DEFAULT_DT,
            duration: DEFAULT_DURATION,
            seed: 0,
            initial: InitialCondition::default(),
            record_stride: DEFAULT_RECORD_STRIDE,
            warmup: None,
            delay_mode: DelayMode::Delayed,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

/// Largest admissible time step, `min(τ, 1/α) / 20`.
pub fn max_dt(params: &ModelParams) -> f64 {
    params.tau.min(1.0 / params.alpha) / 20.0
}

impl SimulationConfig {
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn steps(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }

    pub fn warmup_time(&self) -> f64 {
        self.warmup.unwrap_or(0.5 * self.duration)
    }

    /// Snapshots needed to reach the largest delay `(L/2)/ν` plus the two
    /// interpolation neighbours.
    pub fn history_capacity(&self, params: &ModelParams) -> usize {
        match self.delay_mode {
            DelayMode::Instantaneous => 2,
            DelayMode::Delayed => (0.5 * self.length / (params.nu * self.dt)).ceil() as usize + 2,
        }
    }

    /// Nearest wavenumber `2πm/L` to `k`, with its index `m >= 1`.
    pub fn commensurate(&self, k: f64) -> (usize, f64) {
        let m = ((k.abs() * self.length / std::f64::consts::TAU).round() as usize).max(1);
        (m, std::f64::consts::TAU * m as f64 / self.length)
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        let bad = |msg: String| Err(FieldError::InvalidConfig(msg));
        for (name, v) in [("L", self.length), ("dt", self.dt), ("T", self.duration)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.points < 8 {
            return bad("N must be at least 8".into());
        }
        let limit = max_dt(params);
        if self.dt > limit * (1.0 + 1e-12) {
            return bad(format!("dt = {} exceeds min(tau, 1/alpha)/20 = {limit}", self.dt));
        }
        let range = 10.0 * (1.0f64).max(1.0 / params.r);
        if self.length < range {
            return bad(format!("L = {} must be at least 10 max(1, 1/r) = {range}", self.length));
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1".into());
        }
        if self.steps() == 0 {
            return bad("T must cover at least one step".into());
        }
        let warmup = self.warmup_time();
        if !(warmup.is_finite() && warmup >= 0.0 && warmup < self.duration) {
            return bad(format!("warmup = {warmup} must lie in [0, T)"));
        }
        let bytes = self
            .history_capacity(params)
            .saturating_mul(self.points)
            .saturating_mul(std::mem::size_of::<f64>());
        if bytes > self.memory_budget {
            return bad(format!(
                "history ring needs {bytes} bytes, above the budget of {}",
                self.memory_budget
            ));
        }
        match &self.initial {
            InitialCondition::RandomUniform { amplitude } if !(amplitude.is_finite() && *amplitude >= 0.0) => {
                bad("initial amplitude must be non-negative".into())
            }
            InitialCondition::SingleMode { k, amplitude } if !(k.is_finite() && amplitude.is_finite()) => {
                bad("single-mode k and amplitude must be finite".into())
            }
            InitialCondition::Constant { value: Some(v) } if !v.is_finite() => {
                bad("constant initial value must be finite".into())
            }
            InitialCondition::Explicit { values } if values.len() != self.points => bad(format!(
                "explicit initial field has {} values for N = {}",
                values.len(),
                self.points
            )),
            InitialCondition::Explicit { values } if values.iter().any(|v| !v.is_finite()) => {
                bad("explicit initial field must be finite".into())
            }
            _ => Ok(()),
        }
    }
}
