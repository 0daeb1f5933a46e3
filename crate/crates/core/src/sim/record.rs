use serde::{Deserialize, Serialize};

use super::config::SimulationConfig;
use super::field::Simulation;
use crate::error::FieldError;
use crate::model::ModelParams;

/// Sampled `v(x, t)` with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeRecord {
    pub params: ModelParams,
    pub config: SimulationConfig,
    /// Wavenumber of a single-mode initial condition after snapping.
    pub effective_k: Option<f64>,
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// One row of `N` values per sample.
    pub values: Vec<Vec<f64>>,
}

impl SpaceTimeRecord {
    /// Grid index of the domain-centre probe, `x = L/2`.
    pub fn probe_index(&self) -> usize {
        self.x.len() / 2
    }

    pub fn probe_signal(&self) -> Vec<f64> {
        let p = self.probe_index();
        self.values.iter().map(|row| row[p]).collect()
    }

    pub fn samples(&self) -> usize {
        self.times.len()
    }
}

/// A run that stopped early, with whatever was recorded before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub error: FieldError,
    pub partial: Option<SpaceTimeRecord>,
}

impl From<FieldError> for RunFailure {
    fn from(error: FieldError) -> Self {
        Self { error, partial: None }
    }
}

impl From<RunFailure> for FieldError {
    fn from(f: RunFailure) -> Self {
        f.error
    }
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.partial {
            Some(rec) => write!(f, "{} ({} samples recorded)", self.error, rec.samples()),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {}

/// Integrates for `config.duration`, sampling every `record_stride` steps
/// (including t = 0).
pub fn run(params: &ModelParams, config: &SimulationConfig) -> Result<SpaceTimeRecord, RunFailure> {
    let mut sim = Simulation::new(params, config)?;
    let mut record = SpaceTimeRecord {
        params: *params,
        config: config.clone(),
        effective_k: sim.effective_k(),
        x: sim.x().to_vec(),
        times: vec![0.0],
        values: vec![sim.v().to_vec()],
    };
    let steps = config.steps();
    let stride = config.record_stride as u64;
    for _ in 0..steps {
        if let Err(error) = sim.step() {
            return Err(RunFailure {
                error,
                partial: Some(record),
            });
        }
        if sim.step_index() % stride == 0 {
            record.times.push(sim.time());
            record.values.push(sim.v().to_vec());
        }
    }
    Ok(record)
}
