//! Spatial connectivity kernels.
//!
//! The default kernel is the difference of exponentials
//! `J(z) = (a_e/2) e^{-|z|} - (a_i/2) r e^{-r|z|}`, whose moments and
//! absolute integral have closed forms. A Gaussian difference with the same
//! total weights is provided as an alternative.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature;
use crate::error::{FieldError, Result};

/// Absolute tolerance for moment and absolute-integral quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Upper bound on the neglected tail beyond the truncation radius.
const TAIL_BOUND: f64 = 1e-12;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum KernelShape {
    /// Difference of exponentials with unit excitatory range and range `1/r`
    /// for inhibition.
    MexicanHatExp,
    /// Difference of normalized Gaussians with standard deviations
    /// `sigma_e`, `sigma_i`.
    Gaussian { sigma_e: f64, sigma_i: f64 },
}

impl KernelShape {
    /// Gaussian widths whose second moments match each exponential component:
    /// `sigma_e = sqrt(2)`, `sigma_i = sqrt(2) / r`.
    pub fn gaussian_matching(r: f64) -> Self {
        let s = std::f64::consts::SQRT_2;
        KernelShape::Gaussian {
            sigma_e: s,
            sigma_i: s / r,
        }
    }
}

/// One signed, even, decaying component of a kernel.
#[derive(Debug, Clone, Copy)]
enum Component {
    /// `weight * exp(-rate |z|)`
    Exp { weight: f64, rate: f64 },
    /// `weight * exp(-z^2 / (2 sigma^2))`
    Gauss { weight: f64, sigma: f64 },
}

impl Component {
    fn eval(&self, z: f64) -> f64 {
        match *self {
            Component::Exp { weight, rate } => weight * (-rate * z.abs()).exp(),
            Component::Gauss { weight, sigma } => weight * (-0.5 * (z / sigma).powi(2)).exp(),
        }
    }

    fn length_scale(&self) -> f64 {
        match *self {
            Component::Exp { rate, .. } => 1.0 / rate,
            Component::Gauss { sigma, .. } => sigma,
        }
    }

    /// Radius beyond which `∫_Z^∞ |z|^n |component| dz` is below `bound`.
    fn tail_radius(&self, n: u32, bound: f64) -> f64 {
        let w = match *self {
            Component::Exp { weight, .. } | Component::Gauss { weight, .. } => weight.abs(),
        };
        let scale = self.length_scale();
        if w == 0.0 {
            return 0.0;
        }
        let mut z = scale * (2.0 * n as f64 + 2.0);
        for _ in 0..200 {
            // local decay rate at z, at least half of which survives past z
            // once z exceeds the mode of z^n * envelope
            let (env, rate) = match *self {
                Component::Exp { rate, .. } => ((-rate * z).exp(), rate),
                Component::Gauss { sigma, .. } => ((-0.5 * (z / sigma).powi(2)).exp(), z / (sigma * sigma)),
            };
            let tail = 2.0 * w * z.powi(n as i32) * env / rate;
            if tail < bound {
                return z;
            }
            z *= 1.25;
        }
        z
    }
}

/// The connectivity `J(z)`, an even function of distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialKernel {
    pub a_e: f64,
    pub a_i: f64,
    pub r: f64,
    pub shape: KernelShape,
}

impl SpatialKernel {
    pub fn mexican_hat(a_e: f64, a_i: f64, r: f64) -> Self {
        Self {
            a_e,
            a_i,
            r,
            shape: KernelShape::MexicanHatExp,
        }
    }

    pub fn gaussian(a_e: f64, a_i: f64, r: f64, sigma_e: f64, sigma_i: f64) -> Self {
        Self {
            a_e,
            a_i,
            r,
            shape: KernelShape::Gaussian { sigma_e, sigma_i },
        }
    }

    pub fn is_mexican_hat(&self) -> bool {
        matches!(self.shape, KernelShape::MexicanHatExp)
    }

    fn components(&self) -> [Component; 2] {
        match self.shape {
            KernelShape::MexicanHatExp => [
                Component::Exp {
                    weight: 0.5 * self.a_e,
                    rate: 1.0,
                },
                Component::Exp {
                    weight: -0.5 * self.a_i * self.r,
                    rate: self.r,
                },
            ],
            KernelShape::Gaussian { sigma_e, sigma_i } => [
                Component::Gauss {
                    weight: self.a_e / (SQRT_2PI * sigma_e),
                    sigma: sigma_e,
                },
                Component::Gauss {
                    weight: -self.a_i / (SQRT_2PI * sigma_i),
                    sigma: sigma_i,
                },
            ],
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        let [e, i] = self.components();
        e.eval(z) + i.eval(z)
    }

    /// Radius beyond which both components contribute less than the tail
    /// bound to a moment of order `n` (per half-line).
    pub fn truncation_radius(&self, n: u32) -> f64 {
        self.components()
            .iter()
            .map(|c| c.tail_radius(n, TAIL_BOUND))
            .fold(0.0, f64::max)
    }

    /// Distance on the positive half-line where `J` changes sign, when the
    /// crossing is available in closed form.
    pub fn sign_change(&self) -> Option<f64> {
        if self.a_e <= 0.0 || self.a_i <= 0.0 {
            return None;
        }
        let z = match self.shape {
            KernelShape::MexicanHatExp => {
                if self.r == 1.0 {
                    return None;
                }
                (self.a_e / (self.a_i * self.r)).ln() / (1.0 - self.r)
            }
            KernelShape::Gaussian { sigma_e, sigma_i } => {
                // w_e e^{-z²/2σe²} = w_i e^{-z²/2σi²}
                let we = self.a_e / sigma_e;
                let wi = self.a_i / sigma_i;
                let denom = 0.5 / (sigma_i * sigma_i) - 0.5 / (sigma_e * sigma_e);
                if denom == 0.0 {
                    return None;
                }
                let z2 = (wi / we).ln() / denom;
                if z2 <= 0.0 {
                    return None;
                }
                z2.sqrt()
            }
        };
        (z.is_finite() && z > 0.0).then_some(z)
    }

    /// `∫ J(z) |z|^n dz` over the whole line.
    ///
    /// Closed forms for the exponential kernel with `n <= 2`; quadrature
    /// otherwise.
    pub fn moment(&self, n: u32) -> Result<f64> {
        if self.is_mexican_hat() && n <= 2 {
            let (a_e, a_i, r) = (self.a_e, self.a_i, self.r);
            return Ok(match n {
                0 => a_e - a_i,
                1 => (r * a_e - a_i) / r,
                _ => 2.0 * (r * r * a_e - a_i) / (r * r),
            });
        }
        self.moment_quadrature(n)
    }

    /// Quadrature path for `moment`, exposed so the closed forms can be
    /// checked against it.
    pub fn moment_quadrature(&self, n: u32) -> Result<f64> {
        let z_max = self.truncation_radius(n);
        let breaks: Vec<f64> = self
            .components()
            .iter()
            .flat_map(|c| [c.length_scale(), 4.0 * c.length_scale()])
            .collect();
        let half = quadrature::integrate(
            |z| self.eval(z) * z.powi(n as i32),
            0.0,
            z_max,
            &breaks,
            0.5 * QUAD_TOL,
        )?;
        Ok(2.0 * half)
    }

    /// `∫ |J(z)| dz`, piecewise analytic for the exponential kernel.
    pub fn abs_integral(&self) -> Result<f64> {
        match self.shape {
            KernelShape::MexicanHatExp => Ok(self.abs_integral_analytic()),
            KernelShape::Gaussian { .. } => self.abs_integral_quadrature(),
        }
    }

    fn abs_integral_analytic(&self) -> f64 {
        // antiderivative of J on the positive half-line
        let g = |z: f64| -> f64 {
            if z.is_infinite() {
                return 0.0;
            }
            -0.5 * self.a_e * (-z).exp() + 0.5 * self.a_i * (-self.r * z).exp()
        };
        let half = match self.sign_change() {
            Some(zs) => (g(zs) - g(0.0)).abs() + (g(f64::INFINITY) - g(zs)).abs(),
            None => (g(f64::INFINITY) - g(0.0)).abs(),
        };
        2.0 * half
    }

    /// Quadrature path for `abs_integral`, split at the sign change.
    pub fn abs_integral_quadrature(&self) -> Result<f64> {
        let z_max = self.truncation_radius(0);
        let mut breaks: Vec<f64> = self.sign_change().into_iter().collect();
        breaks.push(1.0);
        breaks.push(1.0 / self.r);
        let half = quadrature::integrate(|z| self.eval(z).abs(), 0.0, z_max, &breaks, 0.5 * QUAD_TOL)?;
        Ok(2.0 * half)
    }

    /// Delayed Fourier transform `∫ J(z) e^{-s|z|} e^{-ikz} dz`.
    ///
    /// For the exponential kernel this is
    /// `a_e p/(p²+k²) - a_i r q/(q²+k²)` with `p = 1+s`, `q = r+s`, valid
    /// while the integrals converge (`Re s > -min(1, r)`).
    pub fn transform(&self, s: Complex64, k: f64) -> Result<Complex64> {
        match self.shape {
            KernelShape::MexicanHatExp => {
                let limit = if self.a_i == 0.0 {
                    1.0
                } else if self.a_e == 0.0 {
                    self.r
                } else {
                    self.r.min(1.0)
                };
                if s.re <= -limit {
                    return Err(FieldError::Domain(format!(
                        "kernel transform diverges for Re(lambda)/nu = {} <= {}",
                        s.re, -limit
                    )));
                }
                let k2 = k * k;
                let p = 1.0 + s;
                let q = self.r + s;
                Ok(self.a_e * p / (p * p + k2) - self.a_i * self.r * q / (q * q + k2))
            }
            KernelShape::Gaussian { sigma_e, sigma_i } => {
                // e^{-z²/2σ² - a z} peaks at z = -a σ² when a < 0
                let shift = (-s.re).max(0.0) * sigma_e.max(sigma_i).powi(2);
                let z_max = shift + self.truncation_radius(0);
                let mut breaks: Vec<f64> = vec![sigma_i, sigma_e, shift];
                if k > 0.0 {
                    let period = std::f64::consts::TAU / k;
                    let n = ((z_max / period).ceil() as usize).min(2000);
                    breaks.extend((1..n).map(|j| j as f64 * period));
                }
                let integrand = |z: f64| self.eval(z) * (-s * z).exp() * (k * z).cos();
                let re = quadrature::integrate(|z| integrand(z).re, 0.0, z_max, &breaks, 0.5 * QUAD_TOL)?;
                let im = quadrature::integrate(|z| integrand(z).im, 0.0, z_max, &breaks, 0.5 * QUAD_TOL)?;
                Ok(2.0 * Complex64::new(re, im))
            }
        }
    }

    /// `∫_a^b J(z) dz` for `0 <= a <= b`.
    pub fn segment_integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!(0.0 <= a && a <= b);
        match self.shape {
            KernelShape::MexicanHatExp => {
                let g = |z: f64| -0.5 * self.a_e * (-z).exp() + 0.5 * self.a_i * (-self.r * z).exp();
                g(b) - g(a)
            }
            KernelShape::Gaussian { .. } => {
                let breaks: Vec<f64> = self.sign_change().into_iter().collect();
                quadrature::integrate(|z| self.eval(z), a, b, &breaks, 1e-14 * (b - a).max(1e-300))
                    .unwrap_or_else(|_| {
                        // fall back to a single high-order panel
                        let h = (b - a) / 64.0;
                        (0..64)
                            .map(|j| {
                                let x0 = a + j as f64 * h;
                                h / 6.0 * (self.eval(x0) + 4.0 * self.eval(x0 + 0.5 * h) + self.eval(x0 + h))
                            })
                            .sum()
                    })
            }
        }
    }
}
