use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::record::SpaceTimeRecord;
use crate::error::{FieldError, Result};

/// Window (time units) used to express oscillation counts.
pub const DEFAULT_COUNT_WINDOW: f64 = 50.0;

/// Peak-to-peak amplitude below which the probe is treated as constant.
pub const FLAT_SIGNAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    /// `max - min` of the probe after warmup.
    pub amplitude: f64,
    pub mean: f64,
    /// Oscillations per `window` time units, from upward mean crossings.
    pub temporal_count: f64,
    pub window: f64,
    /// Index `m` of the strongest spatial Fourier mode (`k = 2πm/L`).
    pub dominant_spatial_mode: Option<usize>,
    pub dominant_wavenumber: Option<f64>,
    /// Strongest temporal frequency of the probe, rad/time.
    pub dominant_temporal_frequency: Option<f64>,
    pub samples: usize,
}

/// Oscillations per `window` from the upward crossings of the mean.
pub fn crossing_count(times: &[f64], signal: &[f64], window: f64) -> f64 {
    let (lo, hi) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    if !(hi - lo > FLAT_SIGNAL * mean.abs().max(1.0)) {
        return 0.0;
    }
    let ups: Vec<f64> = signal
        .windows(2)
        .zip(times.windows(2))
        .filter(|(s, _)| s[0] < mean && s[1] >= mean)
        .map(|(s, t)| t[0] + (mean - s[0]) / (s[1] - s[0]) * (t[1] - t[0]))
        .collect();
    if ups.len() < 2 {
        return 0.0;
    }
    let span = ups[ups.len() - 1] - ups[0];
    (ups.len() - 1) as f64 / span * window
}

fn spectral_peak(power: &[f64]) -> Option<usize> {
    let (idx, &best) = power
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    (best > 0.0).then_some(idx)
}

pub fn analyze_record(record: &SpaceTimeRecord, warmup: f64, window: f64) -> Result<PatternMetrics> {
    let start = record.times.iter().position(|&t| t >= warmup).unwrap_or(record.times.len());
    let times = &record.times[start..];
    let rows = &record.values[start..];
    if times.len() < 4 || times[times.len() - 1] <= times[0] {
        return Err(FieldError::InsufficientData(format!(
            "{} samples after warmup {warmup}; need at least 4",
            times.len()
        )));
    }
    let probe = record.probe_index();
    let signal: Vec<f64> = rows.iter().map(|r| r[probe]).collect();
    let (lo, hi) = signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;

    let mut planner = FftPlanner::<f64>::new();

    // spatial spectrum averaged over snapshots
    let n = record.x.len();
    let fft = planner.plan_fft_forward(n);
    let mut power = vec![0.0; n / 2 + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for row in rows {
        let m = row.iter().sum::<f64>() / n as f64;
        for (b, &v) in buf.iter_mut().zip(row) {
            *b = Complex64::new(v - m, 0.0);
        }
        fft.process(&mut buf);
        for (p, b) in power.iter_mut().zip(&buf) {
            *p += b.norm_sqr();
        }
    }
    let spatial = spectral_peak(&power);
    let length = record.config.length;

    // probe spectrum
    let nt = signal.len();
    let fft = planner.plan_fft_forward(nt);
    let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    fft.process(&mut buf);
    let tpower: Vec<f64> = buf[..nt / 2 + 1].iter().map(|b| b.norm_sqr()).collect();
    let sample_dt = (times[nt - 1] - times[0]) / (nt - 1) as f64;
    let temporal = spectral_peak(&tpower).map(|j| std::f64::consts::TAU * j as f64 / (nt as f64 * sample_dt));

    Ok(PatternMetrics {
        amplitude: hi - lo,
        mean,
        temporal_count: crossing_count(times, &signal, window),
        window,
        dominant_spatial_mode: spatial,
        dominant_wavenumber: spatial.map(|m| std::f64::consts::TAU * m as f64 / length),
        dominant_temporal_frequency: temporal,
        samples: nt,
    })
}
