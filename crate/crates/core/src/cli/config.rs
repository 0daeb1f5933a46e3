use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::error::CliError;
use crate::model::{KernelSpec, ModelParams, ParamName};
use crate::sim::{DelayMode, InitialCondition, SimulationConfig, DEFAULT_COUNT_WINDOW, DEFAULT_IC_AMPLITUDE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// What a sweep varies: a model parameter or a wavenumber/frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Param(ParamName),
    K,
    Omega,
}

impl SweepTarget {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "k" => Some(SweepTarget::K),
            "omega" => Some(SweepTarget::Omega),
            _ => ParamName::parse(s).map(SweepTarget::Param),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepTarget::Param(p) => p.as_str(),
            SweepTarget::K => "k",
            SweepTarget::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub target: SweepTarget,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// `name=start:stop:step`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = || CliError::config(format!("sweep must look like name=start:stop:step, got {spec:?}"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let sweep = Sweep {
            target: SweepTarget::parse(name.trim())
                .ok_or_else(|| CliError::config(format!("unknown sweep parameter {:?}", name.trim())))?,
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::config("sweep start must be below stop"));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(CliError::config("sweep step must be positive"));
        }
        Ok(())
    }

    /// `start, start + step, ...` up to `stop` (inclusive within rounding).
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Settings for the analysis commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    /// Curve plane, e.g. `alpha-nu` or `r-k`.
    pub plane: Option<String>,
    /// Fixed wavenumber (dispersion, turing-curve, growth-probe).
    pub k: Option<f64>,
    /// Fixed frequency (dispersion, turing-curve).
    pub omega: Option<f64>,
    /// Keep `a_i = a_e / r` while sweeping.
    pub tie_inhibition: bool,
    /// Window for oscillation counts.
    pub count_window: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            plane: None,
            k: None,
            omega: None,
            tie_inhibition: false,
            count_window: DEFAULT_COUNT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl OutputSpec {
    pub fn with_format(self, format: Format) -> Self {
        Self { format, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelParams,
    pub simulation: SimulationConfig,
    pub sweep: Option<Sweep>,
    pub analysis: AnalysisSettings,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(CliError::from)?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if !(self.analysis.count_window.is_finite() && self.analysis.count_window > 0.0) {
            return Err(CliError::config("count_window must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct PartialSweep {
    target: Option<SweepTarget>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
}

#[derive(Debug, Default)]
struct PartialInitial {
    mode: Option<String>,
    amplitude: Option<f64>,
    k: Option<f64>,
    value: Option<f64>,
    sigma_e: Option<f64>,
    sigma_i: Option<f64>,
    kernel: Option<String>,
}

/// Parses the line-oriented `key = value` format with `[section]` headers.
/// `#` starts a comment. Keys outside a section, unknown sections and
/// unknown keys are errors.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let mut sweep = PartialSweep::default();
    let mut extra = PartialInitial::default();
    let mut section: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::parse(line_no, "unterminated section header"))?
                .trim();
            if !matches!(name, "model" | "simulation" | "sweep" | "analysis" | "output") {
                return Err(CliError::parse(line_no, format!("unknown section [{name}]")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::parse(line_no, format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| CliError::parse(line_no, format!("{key}: {value:?} is not a number")))
        };
        let int = || {
            value
                .parse::<u64>()
                .map_err(|_| CliError::parse(line_no, format!("{key}: {value:?} is not a non-negative integer")))
        };
        let flag = || match value {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(CliError::parse(line_no, format!("{key}: expected true or false"))),
        };
        let unknown = || Err(CliError::parse(line_no, format!("unknown key {key:?} in [{}]", section.as_deref().unwrap_or(""))));

        let m = &mut cfg.model;
        let s = &mut cfg.simulation;
        let a = &mut cfg.analysis;
        match section.as_deref() {
            None => return Err(CliError::parse(line_no, format!("key {key:?} outside any section"))),
            Some("model") => match key {
                "alpha" => m.alpha = num()?,
                "tau" => m.tau = num()?,
                "c" => m.c = num()?,
                "nu" => m.nu = num()?,
                "E" => m.e_ext = num()?,
                "I0" => m.i0 = num()?,
                "a_e" => m.a_e = num()?,
                "a_i" => m.a_i = num()?,
                "r" => m.r = num()?,
                "gain" => m.gain = num()?,
                "theta" => m.theta = num()?,
                "kernel" => extra.kernel = Some(value.to_string()),
                "sigma_e" => extra.sigma_e = Some(num()?),
                "sigma_i" => extra.sigma_i = Some(num()?),
                _ => return unknown(),
            },
            Some("simulation") => match key {
                "L" => s.length = num()?,
                "N" => s.points = int()? as usize,
                "dt" => s.dt = num()?,
                "T" => s.duration = num()?,
                "seed" => s.seed = int()?,
                "record_stride" => s.record_stride = int()? as usize,
                "warmup" => s.warmup = Some(num()?),
                "memory_budget" => s.memory_budget = int()? as usize,
                "delay" => {
                    s.delay_mode = match value {
                        "delayed" => DelayMode::Delayed,
                        "instantaneous" => DelayMode::Instantaneous,
                        _ => return Err(CliError::parse(line_no, "delay must be delayed or instantaneous")),
                    }
                }
                "ic" => extra.mode = Some(value.to_string()),
                "ic_amplitude" => extra.amplitude = Some(num()?),
                "ic_k" => extra.k = Some(num()?),
                "ic_value" => extra.value = Some(num()?),
                _ => return unknown(),
            },
            Some("sweep") => match key {
                "param" => {
                    sweep.target = Some(
                        SweepTarget::parse(value)
                            .ok_or_else(|| CliError::parse(line_no, format!("unknown sweep parameter {value:?}")))?,
                    )
                }
                "start" => sweep.start = Some(num()?),
                "stop" => sweep.stop = Some(num()?),
                "step" => sweep.step = Some(num()?),
                _ => return unknown(),
            },
            Some("analysis") => match key {
                "plane" => a.plane = Some(value.to_string()),
                "k" => a.k = Some(num()?),
                "omega" => a.omega = Some(num()?),
                "tie_inhibition" => a.tie_inhibition = flag()?,
                "count_window" => a.count_window = num()?,
                _ => return unknown(),
            },
            Some(_) => match key {
                "path" => cfg.output.path = Some(PathBuf::from(value)),
                "format" => {
                    cfg.output.format =
                        Format::parse(value).ok_or_else(|| CliError::parse(line_no, "format must be csv or json"))?
                }
                _ => return unknown(),
            },
        }
    }

    cfg.model.kernel = match extra.kernel.as_deref() {
        None | Some("exponential") => {
            if extra.sigma_e.is_some() || extra.sigma_i.is_some() {
                return Err(CliError::config("sigma_e/sigma_i need kernel = gaussian"));
            }
            KernelSpec::MexicanHatExp
        }
        Some("gaussian") => KernelSpec::Gaussian {
            sigma_e: extra.sigma_e,
            sigma_i: extra.sigma_i,
        },
        Some(other) => return Err(CliError::config(format!("kernel must be exponential or gaussian, got {other:?}"))),
    };

    cfg.simulation.initial = match extra.mode.as_deref() {
        None | Some("random") => InitialCondition::RandomUniform {
            amplitude: extra.amplitude.unwrap_or(DEFAULT_IC_AMPLITUDE),
        },
        Some("single_mode") => InitialCondition::SingleMode {
            k: extra.k.ok_or_else(|| CliError::config("ic = single_mode needs ic_k"))?,
            amplitude: extra.amplitude.unwrap_or(DEFAULT_IC_AMPLITUDE),
        },
        Some("constant") => InitialCondition::Constant { value: extra.value },
        Some(other) => {
            return Err(CliError::config(format!(
                "ic must be random, single_mode or constant, got {other:?}"
            )))
        }
    };

    cfg.sweep = match sweep {
        PartialSweep {
            target: None,
            start: None,
            stop: None,
            step: None,
        } => None,
        PartialSweep {
            target: Some(target),
            start: Some(start),
            stop: Some(stop),
            step: Some(step),
        } => Some(Sweep {
            target,
            start,
            stop,
            step,
        }),
        _ => return Err(CliError::config("[sweep] needs param, start, stop and step")),
    };

    cfg.validate()?;
    Ok(cfg)
}
