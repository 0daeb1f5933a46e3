use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{InitialCondition, SimulationConfig};
use super::field::Simulation;
use crate::error::{FieldError, Result};
use crate::linear::spectrum;
use crate::model::ModelParams;

/// Seed amplitude of the probed mode.
pub const PROBE_AMPLITUDE: f64 = 1e-5;
/// Mode amplitude at which the linear window closes.
pub const LINEAR_LIMIT: f64 = 1e-2;
/// Relative least-squares residual above which the fit is rejected.
pub const FIT_TOL: f64 = 1e-2;
/// Fit lag in time units (rounded to whole steps).
pub const FIT_LAG: f64 = 0.2;
/// Mode amplitude below which samples are rounding noise.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthMeasurement {
    /// Wavenumber actually seeded.
    pub k: f64,
    pub mode: usize,
    /// Fitted growth rate.
    pub sigma: f64,
    /// Fitted angular frequency (non-negative).
    pub omega: f64,
    pub fit_residual: f64,
    pub fit_order: usize,
    pub window: (f64, f64),
    /// Dominant genuine root of the characteristic equation at `k`.
    pub predicted: Option<Complex64>,
}

impl GrowthMeasurement {
    pub fn relative_error(&self) -> Option<f64> {
        self.predicted.map(|p| (p.re - self.sigma).abs() / p.re.abs().max(1e-12))
    }
}

/// Fits `a[i + 2l] = p1 a[i + l] + p2 a[i]` (order 2) or `a[i + l] = z a[i]`
/// (order 1) and returns the dominant exponent per unit lag with the relative
/// residual and the order used.
fn prony(a: &[f64], lag: usize) -> Option<(Complex64, f64, usize)> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || a.len() < 2 * lag + 3 {
        return None;
    }
    let y: Vec<f64> = a.iter().map(|v| v / scale).collect();

    let mut m = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    let mut yy = 0.0;
    for i in 0..y.len() - 2 * lag {
        let x = Vector2::new(y[i + lag], y[i]);
        m += x * x.transpose();
        rhs += x * y[i + 2 * lag];
        yy += y[i + 2 * lag].powi(2);
    }
    let well_posed = m.determinant().abs() > 1e-12 * m.norm_squared();
    if let (true, Some(p)) = (well_posed, m.try_inverse().map(|inv| inv * rhs)) {
        let res: f64 = (0..y.len() - 2 * lag)
            .map(|i| (y[i + 2 * lag] - p[0] * y[i + lag] - p[1] * y[i]).powi(2))
            .sum();
        // z^2 - p1 z - p2 = 0
        let disc = Complex64::new(p[0] * p[0] + 4.0 * p[1], 0.0).sqrt();
        let z1 = (p[0] + disc) / 2.0;
        let z2 = (p[0] - disc) / 2.0;
        let z = if z1.norm() >= z2.norm() { z1 } else { z2 };
        return Some((z.ln(), (res / yy).sqrt(), 2));
    }

    let (mut num, mut den, mut yy) = (0.0, 0.0, 0.0);
    for i in 0..y.len() - lag {
        num += y[i] * y[i + lag];
        den += y[i] * y[i];
        yy += y[i + lag] * y[i + lag];
    }
    if den == 0.0 {
        return None;
    }
    let z = num / den;
    let res: f64 = (0..y.len() - lag).map(|i| (y[i + lag] - z * y[i]).powi(2)).sum();
    Some((Complex64::new(z, 0.0).ln(), (res / yy).sqrt(), 1))
}

/// Seeds `v0 + 1e-5 cos(k x)` with `k` on the periodic grid, follows the cosine
/// coefficient of that mode after `config.warmup_time()` until it leaves the
/// linear regime, and fits its growth rate and frequency.
///
/// The warmup has to outlast the transients of the other roots and of the
/// constant pre-history, which persists for up to `L/(2ν)`.
pub fn linear_growth_probe(params: &ModelParams, k: f64, config: &SimulationConfig) -> Result<GrowthMeasurement> {
    let (mode, k_grid) = config.commensurate(k);
    if (k_grid - k.abs()).abs() > 1e-9 * k_grid {
        return Err(FieldError::InvalidConfig(format!(
            "k = {k} does not fit the domain; nearest is {k_grid} (m = {mode})"
        )));
    }
    let config = SimulationConfig {
        initial: InitialCondition::SingleMode {
            k: k_grid,
            amplitude: PROBE_AMPLITUDE,
        },
        ..config.clone()
    };
    let mut sim = Simulation::new(params, &config)?;
    let n = config.points as f64;
    let basis: Vec<f64> = sim.x().iter().map(|x| (k_grid * x).cos()).collect();
    let coefficient =
        |v: &[f64]| -> f64 { 2.0 / n * v.iter().zip(&basis).map(|(v, b)| v * b).sum::<f64>() };

    let start = config.warmup_time();
    let steps = config.steps();
    let mut t0 = None;
    let mut samples = Vec::new();
    for _ in 0..steps {
        sim.step()?;
        if sim.time() + 1e-12 < start {
            continue;
        }
        t0.get_or_insert(sim.time());
        let a = coefficient(sim.v());
        samples.push(a);
        if a.abs() > LINEAR_LIMIT {
            break;
        }
    }
    // a decaying mode eventually drops into rounding noise
    let keep = samples.iter().rposition(|a| a.abs() > NOISE_FLOOR).map_or(0, |i| i + 1);
    samples.truncate(keep);
    let t0 = t0.unwrap_or(start);
    let window = (t0, t0 + samples.len().saturating_sub(1) as f64 * config.dt);

    let lag = ((FIT_LAG / config.dt).round() as usize).max(1);
    let lag_time = lag as f64 * config.dt;
    let (exponent, fit_residual, fit_order) = prony(&samples, lag).ok_or_else(|| {
        FieldError::InsufficientData(format!(
            "{} samples in the fit window [{}, {}] for lag {lag}",
            samples.len(),
            window.0,
            window.1
        ))
    })?;
    if !(fit_residual <= FIT_TOL) {
        return Err(FieldError::FitQuality(format!(
            "relative residual {fit_residual:.3e} above {FIT_TOL:.0e} (order {fit_order})"
        )));
    }
    let predicted = spectrum(params, k_grid).ok().and_then(|s| s.dominant_valid());
    Ok(GrowthMeasurement {
        k: k_grid,
        mode,
        sigma: exponent.re / lag_time,
        omega: exponent.im.abs() / lag_time,
        fit_residual,
        fit_order,
        window,
        predicted,
    })
}
