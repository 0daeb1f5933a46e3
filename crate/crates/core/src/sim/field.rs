use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{DelayMode, InitialCondition, SimulationConfig};
use crate::error::{FieldError, Result};
use crate::model::{ModelParams, Sigmoid};

/// Where a delayed value is read from, for one distance class and one
/// Runge-Kutta stage offset θ.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Tap {
    /// `(1 - w) v_n + w v_stage`: the delayed time falls inside the current
    /// step.
    Stage { w: f64 },
    /// `(1 - frac) v_{n-j} + frac v_{n-j-1}`.
    History { j: usize, frac: f64 },
}

/// Past snapshots, newest first.
#[derive(Debug, Clone)]
struct History {
    data: Vec<f64>,
    n: usize,
    capacity: usize,
    head: usize,
}

impl History {
    fn filled(v: &[f64], capacity: usize) -> Self {
        let n = v.len();
        let mut data = Vec::with_capacity(capacity * n);
        for _ in 0..capacity {
            data.extend_from_slice(v);
        }
        Self {
            data,
            n,
            capacity,
            head: 0,
        }
    }

    /// Snapshot `j` steps in the past.
    #[inline]
    fn get(&self, j: usize) -> &[f64] {
        let row = (self.head + self.capacity - j) % self.capacity;
        &self.data[row * self.n..(row + 1) * self.n]
    }

    fn push(&mut self, v: &[f64]) {
        self.head = (self.head + 1) % self.capacity;
        let row = self.head;
        self.data[row * self.n..(row + 1) * self.n].copy_from_slice(v);
    }
}

/// Delayed neural field on a periodic grid, integrated with classical RK4 on
/// `(v, A)`:
///
/// ```text
/// dA/dt = α (S - A)
/// dv/dt = α (S - A) + E - v/τ
/// ```
///
/// `A(x, t) = α ∫ e^{-α(t-s)} S(x, s) ds` replaces the temporal convolution,
/// and `S` is the delayed spatial drive.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: ModelParams,
    config: SimulationConfig,
    sigmoid: Sigmoid,
    x: Vec<f64>,
    /// Kernel weight per distance class (one side).
    weights: Vec<f64>,
    /// Taps per distance class for θ = 0, dt/2, dt.
    taps: [Vec<Tap>; 3],
    history: History,
    v: Vec<f64>,
    a: Vec<f64>,
    step_index: u64,
    effective_k: Option<f64>,
}

/// Right-hand side of the reduced system at one grid point: `(dv/dt, dA/dt)`
/// for potential `v`, auxiliary state `a` and drive `s`.
#[inline]
pub fn field_rhs(params: &ModelParams, v: f64, a: f64, s: f64) -> (f64, f64) {
    let da = params.alpha * (s - a);
    (da + params.e_ext - v / params.tau, da)
}

impl Simulation {
    pub fn new(params: &ModelParams, config: &SimulationConfig) -> Result<Self> {
        config.validate(params)?;
        let n = config.points;
        let h = config.spacing();
        let v0 = params.equilibrium();
        let mut effective_k = None;
        let v: Vec<f64> = match &config.initial {
            InitialCondition::RandomUniform { amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                (0..n)
                    .map(|_| {
                        if *amplitude > 0.0 {
                            v0 + rng.gen_range(-amplitude..=*amplitude)
                        } else {
                            v0
                        }
                    })
                    .collect()
            }
            InitialCondition::SingleMode { k, amplitude } => {
                let (_, k) = config.commensurate(*k);
                effective_k = Some(k);
                (0..n).map(|j| v0 + amplitude * (k * j as f64 * h).cos()).collect()
            }
            InitialCondition::Constant { value } => vec![value.unwrap_or(v0); n],
            InitialCondition::Explicit { values } => values.clone(),
        };
        let mut sim = Self::assemble(params, config, v)?;
        sim.effective_k = effective_k;
        sim.a = sim.drive_at(&sim.v, 0);
        Ok(sim)
    }

    /// Starts from an arbitrary past: `past(x, t)` for `t <= 0` fills the
    /// history ring and `past(x, 0)` is the initial field.
    pub fn with_history<F: Fn(f64, f64) -> f64>(params: &ModelParams, config: &SimulationConfig, past: F) -> Result<Self> {
        config.validate(params)?;
        let n = config.points;
        let h = config.spacing();
        let v: Vec<f64> = (0..n).map(|j| past(j as f64 * h, 0.0)).collect();
        let mut sim = Self::assemble(params, config, v)?;
        let cap = sim.history.capacity;
        for age in (0..cap).rev() {
            let t = -(age as f64) * config.dt;
            let row: Vec<f64> = (0..n).map(|j| past(j as f64 * h, t)).collect();
            sim.history.push(&row);
        }
        sim.a = sim.drive_at(&sim.v, 0);
        Ok(sim)
    }

    fn assemble(params: &ModelParams, config: &SimulationConfig, v: Vec<f64>) -> Result<Self> {
        let n = config.points;
        let h = config.spacing();
        let kernel = params.kernel();
        let half = n / 2;

        let weights: Vec<f64> = (0..=half)
            .map(|o| {
                let d = o as f64 * h;
                if o == 0 {
                    2.0 * kernel.segment_integral(0.0, 0.5 * h)
                } else if 2 * o == n {
                    2.0 * kernel.segment_integral(d - 0.5 * h, d)
                } else {
                    kernel.segment_integral(d - 0.5 * h, d + 0.5 * h)
                }
            })
            .collect();

        let delays: Vec<f64> = (0..=half)
            .map(|o| match config.delay_mode {
                DelayMode::Delayed => o as f64 * h / params.nu,
                DelayMode::Instantaneous => 0.0,
            })
            .collect();
        let dt = config.dt;
        let taps_for = |theta: f64| -> Vec<Tap> {
            delays
                .iter()
                .map(|&d| {
                    if theta > 0.0 && d <= theta {
                        Tap::Stage { w: (theta - d) / theta }
                    } else {
                        let b = (d - theta) / dt;
                        let j = b.floor();
                        Tap::History {
                            j: j as usize,
                            frac: b - j,
                        }
                    }
                })
                .collect()
        };
        let taps = [taps_for(0.0), taps_for(0.5 * dt), taps_for(dt)];
        let capacity = config.history_capacity(params);
        let reach = taps
            .iter()
            .flatten()
            .map(|t| match *t {
                Tap::History { j, .. } => j + 2,
                Tap::Stage { .. } => 1,
            })
            .max()
            .unwrap_or(1);
        if reach > capacity {
            return Err(FieldError::HistoryOverflow {
                requested: reach,
                capacity,
            });
        }

        Ok(Self {
            params: *params,
            config: config.clone(),
            sigmoid: params.transfer(),
            x: (0..n).map(|j| j as f64 * h).collect(),
            weights,
            taps,
            history: History::filled(&v, capacity),
            a: vec![0.0; n],
            v,
            step_index: 0,
            effective_k: None,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    /// Auxiliary convolution state `A`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.config.dt
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Wavenumber actually seeded by a single-mode initial condition.
    pub fn effective_k(&self) -> Option<f64> {
        self.effective_k
    }

    /// Sum of all discrete kernel weights, the grid counterpart of `J0`.
    pub fn discrete_j0(&self) -> f64 {
        let n = self.config.points;
        self.weights
            .iter()
            .enumerate()
            .map(|(o, w)| if o == 0 || 2 * o == n { *w } else { 2.0 * w })
            .sum()
    }

    /// Drive `S` at the current time from the current field and history.
    pub fn delayed_drive(&self) -> Vec<f64> {
        self.drive_at(&self.v, 0)
    }

    /// `S(x) = c Σ_y w(d) F(v(y, t + θ - d/ν)) + I0` with θ from `stage`
    /// (0, dt/2, dt) and `stage_v` the Runge-Kutta stage field at `t + θ`.
    fn drive_at(&self, stage_v: &[f64], stage: usize) -> Vec<f64> {
        let n = self.config.points;
        let mut scratch = vec![0.0; self.weights.len() * n];
        let taps = &self.taps[stage];
        let history = &self.history;
        let sigmoid = self.sigmoid;
        scratch
            .par_chunks_mut(n)
            .zip(taps.par_iter())
            .for_each(|(row, tap)| match *tap {
                Tap::Stage { w } => {
                    let now = history.get(0);
                    for ((g, &a), &b) in row.iter_mut().zip(now).zip(stage_v) {
                        *g = sigmoid.value((1.0 - w) * a + w * b);
                    }
                }
                Tap::History { j, frac } => {
                    let newer = history.get(j);
                    if frac == 0.0 {
                        for (g, &a) in row.iter_mut().zip(newer) {
                            *g = sigmoid.value(a);
                        }
                    } else {
                        let older = history.get(j + 1);
                        for ((g, &a), &b) in row.iter_mut().zip(newer).zip(older) {
                            *g = sigmoid.value((1.0 - frac) * a + frac * b);
                        }
                    }
                }
            });

        let scratch = &scratch;
        let weights = &self.weights;
        let (c, i0) = (self.params.c, self.params.i0);
        (0..n)
            .into_par_iter()
            .map(|x| {
                let mut acc = 0.0;
                for (o, &w) in weights.iter().enumerate() {
                    let row = &scratch[o * n..(o + 1) * n];
                    let fwd = row[(x + o) % n];
                    acc += if o == 0 || 2 * o == n {
                        w * fwd
                    } else {
                        w * (fwd + row[(x + n - o) % n])
                    };
                }
                c * acc + i0
            })
            .collect()
    }

    /// Advances by one step of classical RK4.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.config.dt;
        let n = self.config.points;
        let p = self.params;
        let v = self.v.clone();
        let a = self.a.clone();

        let eval = |vs: &[f64], as_: &[f64], s: &[f64]| -> (Vec<f64>, Vec<f64>) {
            (0..n).map(|j| field_rhs(&p, vs[j], as_[j], s[j])).unzip()
        };
        let advance = |base: &[f64], k: &[f64], h: f64| -> Vec<f64> {
            base.iter().zip(k).map(|(b, k)| b + h * k).collect()
        };

        let s1 = self.drive_at(&v, 0);
        let (k1v, k1a) = eval(&v, &a, &s1);
        let (v2, a2) = (advance(&v, &k1v, 0.5 * dt), advance(&a, &k1a, 0.5 * dt));
        let s2 = self.drive_at(&v2, 1);
        let (k2v, k2a) = eval(&v2, &a2, &s2);
        let (v3, a3) = (advance(&v, &k2v, 0.5 * dt), advance(&a, &k2a, 0.5 * dt));
        let s3 = self.drive_at(&v3, 1);
        let (k3v, k3a) = eval(&v3, &a3, &s3);
        let (v4, a4) = (advance(&v, &k3v, dt), advance(&a, &k3a, dt));
        let s4 = self.drive_at(&v4, 2);
        let (k4v, k4a) = eval(&v4, &a4, &s4);

        for j in 0..n {
            self.v[j] = v[j] + dt / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
            self.a[j] = a[j] + dt / 6.0 * (k1a[j] + 2.0 * k2a[j] + 2.0 * k3a[j] + k4a[j]);
        }
        self.step_index += 1;
        if self.v.iter().chain(&self.a).any(|x| !x.is_finite()) {
            return Err(FieldError::Divergence {
                step: self.step_index,
                time: self.time(),
            });
        }
        self.history.push(&self.v);
        Ok(())
    }
}
