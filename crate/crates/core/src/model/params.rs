use serde::{Deserialize, Serialize};

use super::kernel::{KernelShape, SpatialKernel};
use super::transfer::Sigmoid;
use crate::error::{FieldError, Result};

/// Kernel selection as configured. Gaussian widths left unset follow `r`
/// (second-moment matching), so they stay consistent under `r` sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum KernelSpec {
    #[default]
    MexicanHatExp,
    Gaussian {
        sigma_e: Option<f64>,
        sigma_i: Option<f64>,
    },
}

/// Full parameter tuple of the field model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Memory decay rate of the exponential temporal kernel (1/time).
    pub alpha: f64,
    /// Synaptic (leak) time constant.
    pub tau: f64,
    /// Coupling scale.
    pub c: f64,
    /// Transmission speed.
    pub nu: f64,
    /// External input current.
    #[serde(rename = "E")]
    pub e_ext: f64,
    /// Internal input current.
    #[serde(rename = "I0")]
    pub i0: f64,
    pub a_e: f64,
    pub a_i: f64,
    /// Ratio of excitatory to inhibitory spatial ranges.
    pub r: f64,
    pub gain: f64,
    pub theta: f64,
    pub kernel: KernelSpec,
}

impl Default for ModelParams {
    /// Defaults: c=15, E=0.275, a_e=10, gain=1.8, theta=3, I0=0, with the
    /// remaining values taken from the on-curve Hopf example
    /// (alpha=6, tau=0.75, nu=3, r=5, a_i=2).
    fn default() -> Self {
        Self {
            alpha: 6.0,
            tau: 0.75,
            c: 15.0,
            nu: 3.0,
            e_ext: 0.275,
            i0: 0.0,
            a_e: 10.0,
            a_i: 2.0,
            r: 5.0,
            gain: 1.8,
            theta: 3.0,
            kernel: KernelSpec::MexicanHatExp,
        }
    }
}

/// Names of the scalar model parameters that sweeps may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Alpha,
    Tau,
    Nu,
    R,
    C,
    #[serde(rename = "E")]
    E,
    AE,
    AI,
}

impl ParamName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::Alpha => "alpha",
            ParamName::Tau => "tau",
            ParamName::Nu => "nu",
            ParamName::R => "r",
            ParamName::C => "c",
            ParamName::E => "E",
            ParamName::AE => "a_e",
            ParamName::AI => "a_i",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "alpha" => ParamName::Alpha,
            "tau" => ParamName::Tau,
            "nu" => ParamName::Nu,
            "r" => ParamName::R,
            "c" => ParamName::C,
            "E" => ParamName::E,
            "a_e" => ParamName::AE,
            "a_i" => ParamName::AI,
            _ => return None,
        })
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("alpha", self.alpha),
            ("tau", self.tau),
            ("c", self.c),
            ("nu", self.nu),
            ("E", self.e_ext),
            ("I0", self.i0),
            ("a_e", self.a_e),
            ("a_i", self.a_i),
            ("r", self.r),
            ("gain", self.gain),
            ("theta", self.theta),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(FieldError::InvalidParams(format!("{name} must be finite")));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("tau", self.tau), ("nu", self.nu), ("r", self.r), ("gain", self.gain)] {
            if v <= 0.0 {
                return Err(FieldError::InvalidParams(format!("{name} must be positive")));
            }
        }
        // c = 0 is admitted: it is the uncoupled reference case
        if self.c < 0.0 {
            return Err(FieldError::InvalidParams("c must be non-negative".into()));
        }
        if self.a_e < 0.0 || self.a_i < 0.0 {
            return Err(FieldError::InvalidParams("a_e and a_i must be non-negative".into()));
        }
        if self.a_e == 0.0 && self.a_i == 0.0 {
            return Err(FieldError::InvalidParams("a_e and a_i must not both be zero".into()));
        }
        if let KernelSpec::Gaussian { sigma_e, sigma_i } = self.kernel {
            for (name, s) in [("sigma_e", sigma_e), ("sigma_i", sigma_i)] {
                if let Some(s) = s {
                    if !(s.is_finite() && s > 0.0) {
                        return Err(FieldError::InvalidParams(format!("{name} must be positive")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn transfer(&self) -> Sigmoid {
        Sigmoid::new(self.gain, self.theta)
    }

    pub fn kernel(&self) -> SpatialKernel {
        let shape = match self.kernel {
            KernelSpec::MexicanHatExp => KernelShape::MexicanHatExp,
            KernelSpec::Gaussian { sigma_e, sigma_i } => {
                let KernelShape::Gaussian {
                    sigma_e: se,
                    sigma_i: si,
                } = KernelShape::gaussian_matching(self.r)
                else {
                    unreachable!()
                };
                KernelShape::Gaussian {
                    sigma_e: sigma_e.unwrap_or(se),
                    sigma_i: sigma_i.unwrap_or(si),
                }
            }
        };
        SpatialKernel {
            a_e: self.a_e,
            a_i: self.a_i,
            r: self.r,
            shape,
        }
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Alpha => self.alpha,
            ParamName::Tau => self.tau,
            ParamName::Nu => self.nu,
            ParamName::R => self.r,
            ParamName::C => self.c,
            ParamName::E => self.e_ext,
            ParamName::AE => self.a_e,
            ParamName::AI => self.a_i,
        }
    }

    /// Copy with one parameter replaced. With `tie_inhibition`, `a_i` is
    /// reset to `a_e / r` afterwards.
    pub fn with(&self, name: ParamName, value: f64, tie_inhibition: bool) -> Self {
        let mut p = *self;
        match name {
            ParamName::Alpha => p.alpha = value,
            ParamName::Tau => p.tau = value,
            ParamName::Nu => p.nu = value,
            ParamName::R => p.r = value,
            ParamName::C => p.c = value,
            ParamName::E => p.e_ext = value,
            ParamName::AE => p.a_e = value,
            ParamName::AI => p.a_i = value,
        }
        if tie_inhibition {
            p.a_i = p.a_e / p.r;
        }
        p
    }

    /// Equilibrium potential `tau * E`.
    #[inline]
    pub fn equilibrium(&self) -> f64 {
        self.tau * self.e_ext
    }

    /// Composite gain `alpha c tau F'(v0)`.
    pub fn beta(&self) -> f64 {
        self.alpha * self.c * self.tau * self.transfer().derivative(self.equilibrium())
    }
}

/// Scalar quantities derived from a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub v0: f64,
    pub f_prime_v0: f64,
    pub beta: f64,
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    /// Stability bound `|beta| ∫|J|`.
    pub d: f64,
}

pub fn equilibrium(params: &ModelParams) -> f64 {
    params.equilibrium()
}

pub fn derived(params: &ModelParams) -> Result<DerivedQuantities> {
    params.validate()?;
    let kernel = params.kernel();
    let v0 = params.equilibrium();
    let f_prime_v0 = params.transfer().derivative(v0);
    let beta = params.alpha * params.c * params.tau * f_prime_v0;
    Ok(DerivedQuantities {
        v0,
        f_prime_v0,
        beta,
        j0: kernel.moment(0)?,
        j1: kernel.moment(1)?,
        j2: kernel.moment(2)?,
        d: beta.abs() * kernel.abs_integral()?,
    })
}
