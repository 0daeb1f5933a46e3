//! Direct integration of the delayed field.
//!
//! With the exponential temporal kernel `η(t) = α e^{-αt}` the integral
//! equation reduces to two ODEs per grid point,
//!
//! ```text
//! dA/dt = α (S - A)
//! dv/dt = α (S - A) + E - v/τ
//! ```
//!
//! where `S(x, t) = c ∫ J(x - y) F(v(y, t - |x - y|/ν)) dy + I0` is the delayed
//! drive and `A` the temporally filtered drive. At equilibrium `A = S` and
//! `v0 = τE`. [`reduce_to_ode`] exposes the pointwise right-hand side.

mod analysis;
mod config;
mod field;
mod probe;
mod record;

pub use analysis::{analyze_record, crossing_count, PatternMetrics, DEFAULT_COUNT_WINDOW};
pub use config::{
    max_dt, DelayMode, InitialCondition, SimulationConfig, DEFAULT_DT, DEFAULT_DURATION, DEFAULT_IC_AMPLITUDE,
    DEFAULT_LENGTH, DEFAULT_MEMORY_BUDGET, DEFAULT_POINTS, DEFAULT_RECORD_STRIDE,
};
pub use field::{field_rhs, Simulation};
pub use probe::{linear_growth_probe, GrowthMeasurement};
pub use record::{run, RunFailure, SpaceTimeRecord};

use crate::error::Result;
use crate::model::ModelParams;

/// Pointwise reduced system for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeReduction {
    pub params: ModelParams,
}

impl OdeReduction {
    /// `(dv/dt, dA/dt)` given potential, filtered drive and instantaneous drive.
    pub fn rhs(&self, v: f64, a: f64, s: f64) -> (f64, f64) {
        field_rhs(&self.params, v, a, s)
    }

    /// Homogeneous rest state `(v0, A0)` with `A0 = c F(v0) J0 + I0`.
    pub fn rest_state(&self) -> Result<(f64, f64)> {
        let p = &self.params;
        let v0 = p.equilibrium();
        let j0 = p.kernel().moment(0)?;
        Ok((v0, p.c * p.transfer().value(v0) * j0 + p.i0))
    }
}

pub fn reduce_to_ode(params: &ModelParams) -> OdeReduction {
    OdeReduction { params: *params }
}
