//! Linearization about the homogeneous equilibrium.
//!
//! A perturbation `e^{λt} e^{ikx}` of `v0` survives when
//!
//! ```text
//! (τλ + 1) = β λ/(α + λ) T(λ/ν, k)
//! ```
//!
//! where `T` is the delayed Fourier transform of the kernel. Clearing the
//! denominators of the exponential kernel gives a degree-six polynomial in λ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FieldError, Result};
use crate::model::{derived, ModelParams};
use crate::poly::RealPolynomial;

/// Distance to the pole at `λ = -α` below which the residual is refused.
pub const POLE_EPS: f64 = 1e-12;

/// Transform residual under which a polynomial root counts as genuine.
pub const VALID_TOL: f64 = 1e-6;
/// Normalized polynomial residual accepted for a spectral root.
pub const ROOT_TOL: f64 = 1e-8;

/// `(τλ+1) - β λ/(α+λ) T(λ/ν, k)`.
pub fn characteristic_residual(params: &ModelParams, lambda: Complex64, k: f64) -> Result<Complex64> {
    params.validate()?;
    if (lambda + params.alpha).norm() < POLE_EPS {
        return Err(FieldError::Domain(format!(
            "lambda = {lambda} is at the pole -alpha = {}",
            -params.alpha
        )));
    }
    let lhs = params.tau * lambda + 1.0;
    if lambda == Complex64::new(0.0, 0.0) {
        // the right-hand side carries a factor λ
        return Ok(lhs);
    }
    let t = params.kernel().transform(lambda / params.nu, k)?;
    Ok(lhs - params.beta() * lambda / (params.alpha + lambda) * t)
}

/// The characteristic equation with denominators cleared, scaled by `ν⁴`:
///
/// ```text
/// (τλ² + (τα+1)λ + α)·P·Q
///   - βλν [a_e (λ+ν) Q - a_i r (λ+νr) P]
/// P = (λ+ν)² + ν²k²,  Q = (λ+νr)² + ν²k²
/// ```
pub fn characteristic_polynomial(params: &ModelParams, k: f64) -> Result<RealPolynomial> {
    params.validate()?;
    if !params.kernel().is_mexican_hat() {
        return Err(FieldError::UnsupportedKernel(
            "the characteristic polynomial needs the exponential kernel".into(),
        ));
    }
    let ModelParams {
        alpha,
        tau,
        nu,
        r,
        a_e,
        a_i,
        ..
    } = *params;
    let beta = params.beta();
    let nk2 = nu * nu * k * k;

    let temporal = RealPolynomial::new(vec![alpha, tau * alpha + 1.0, tau]);
    let shift_e = RealPolynomial::new(vec![nu, 1.0]);
    let shift_i = RealPolynomial::new(vec![nu * r, 1.0]);
    let p = &(&shift_e * &shift_e) + &RealPolynomial::constant(nk2);
    let q = &(&shift_i * &shift_i) + &RealPolynomial::constant(nk2);

    let left = &(&temporal * &p) * &q;
    let coupling = &(&shift_e * &q).scale(a_e) - &(&shift_i * &p).scale(a_i * r);
    let right = &RealPolynomial::new(vec![0.0, beta * nu]) * &coupling;
    Ok(&left - &right)
}

/// Eigenvalues at one wavenumber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub k: f64,
    /// Sorted by descending real part.
    pub roots: Vec<Complex64>,
    pub max_real_part: f64,
    /// Normalized polynomial residual per root.
    pub residuals: Vec<f64>,
    /// `|characteristic_residual|` per root where the transform converges.
    pub transform_residuals: Vec<Option<f64>>,
}

impl SpectrumResult {
    /// Root with the largest real part.
    pub fn dominant(&self) -> Complex64 {
        self.roots[0]
    }

    /// Root with the largest real part among those that also satisfy the
    /// transform form of the equation (cleared denominators add spurious ones).
    pub fn dominant_valid(&self) -> Option<Complex64> {
        self.roots
            .iter()
            .zip(&self.transform_residuals)
            .find(|(z, r)| matches!(r, Some(r) if *r < VALID_TOL * (1.0 + z.norm())))
            .map(|(z, _)| *z)
    }
}

/// Newton steps on the transform residual itself. At large `|λ|` the
/// polynomial root can sit a few ulps off the transform root.
fn polish_transform(params: &ModelParams, k: f64, mut z: Complex64) -> Complex64 {
    let f = |z: Complex64| characteristic_residual(params, z, k).ok();
    let Some(mut fz) = f(z) else { return z };
    if !(fz.norm() < VALID_TOL * (1.0 + z.norm())) {
        return z;
    }
    for _ in 0..4 {
        let h = 1e-7 * (1.0 + z.norm());
        let (Some(up), Some(down)) = (f(z + h), f(z - h)) else { break };
        let d = (up - down) / (2.0 * h);
        let cand = z - fz / d;
        match f(cand) {
            Some(fc) if fc.norm() < fz.norm() => {
                z = cand;
                fz = fc;
            }
            _ => break,
        }
    }
    z
}

pub fn spectrum(params: &ModelParams, k: f64) -> Result<SpectrumResult> {
    let poly = characteristic_polynomial(params, k)?;
    let mut roots: Vec<Complex64> = poly.roots()?.into_iter().map(|z| polish_transform(params, k, z)).collect();
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let residuals: Vec<f64> = roots.iter().map(|&z| poly.normalized_residual(z)).collect();
    if let Some((i, &worst)) = residuals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .filter(|(_, &w)| !(w < ROOT_TOL))
    {
        return Err(FieldError::RootFinder(format!(
            "root {} at k = {k} has normalized residual {worst:.3e}; roots = {roots:?}",
            roots[i]
        )));
    }
    let transform_residuals = roots
        .iter()
        .map(|&z| characteristic_residual(params, z, k).ok().map(|c| c.norm()))
        .collect();
    Ok(SpectrumResult {
        k,
        max_real_part: roots[0].re,
        roots,
        residuals,
        transform_residuals,
    })
}

/// Sufficient stability bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityBound {
    /// `|β| ∫|J|`
    pub d: f64,
    /// `d < 1`
    pub sufficient_stable: bool,
}

pub fn stability_bound(params: &ModelParams) -> Result<StabilityBound> {
    let d = derived(params)?.d;
    Ok(StabilityBound {
        d,
        sufficient_stable: d < 1.0,
    })
}

/// `min_ω |τiω + 1| = 1`, attained at `ω = 0`: the threshold against which
/// `D` is compared, sampled on an explicit frequency grid.
pub fn min_leak_modulus(params: &ModelParams, omegas: &[f64]) -> f64 {
    omegas
        .iter()
        .map(|&w| Complex64::new(1.0, params.tau * w).norm())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticCheckEntry {
    pub k: f64,
    pub residual_re: f64,
    pub residual_im: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticCheckReport {
    pub entries: Vec<StaticCheckEntry>,
    pub all_pass: bool,
}

/// Checks that `λ = 0` never solves the characteristic equation: the residual
/// there is exactly 1 for every wavenumber, so no static pattern can bifurcate.
pub fn static_bifurcation_check(params: &ModelParams, k_grid: &[f64]) -> StaticCheckReport {
    let entries: Vec<StaticCheckEntry> = k_grid
        .iter()
        .map(|&k| match characteristic_residual(params, Complex64::new(0.0, 0.0), k) {
            Ok(res) => StaticCheckEntry {
                k,
                residual_re: res.re,
                residual_im: res.im,
                pass: res == Complex64::new(1.0, 0.0),
            },
            Err(_) => StaticCheckEntry {
                k,
                residual_re: f64::NAN,
                residual_im: f64::NAN,
                pass: false,
            },
        })
        .collect();
    let all_pass = entries.iter().all(|e| e.pass);
    StaticCheckReport { entries, all_pass }
}
