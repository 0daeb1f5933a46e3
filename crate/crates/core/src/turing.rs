//! Turing-Hopf dispersion relation.
//!
//! Marginal modes `λ = iω` at wavenumber `k ≠ 0` satisfy
//!
//! ```text
//! c4 ω⁴ + c2 ω² + c0 = 0
//! c4 = (τ/ν²) M2
//! c2 = τ(a_i - a_e) + (τk² - α/ν²) M2 + ((ατ+1)/ν) M1
//! c0 = α((a_e - a_i) - k² M2)
//! ```
//!
//! with `M1 = (r a_e - a_i)/r` and `M2 = (r² a_e - a_i)/r²`. The relation is
//! quadratic in `ω²` and linear in `k²`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FieldError, Result};
use crate::hopf::{check_monotone, Gap};
use crate::linear::{characteristic_polynomial, spectrum, ROOT_TOL};
use crate::model::{ModelParams, ParamName};

/// Relative window around `sqrt(α/τ)` where k-solving is refused.
pub const SINGULAR_WINDOW: f64 = 1e-6;
/// Relative tolerance on `|M2|` for the quartic to be non-degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Normalized residual accepted for a dispersion point.
pub const POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Relation {
    c4: f64,
    c2: f64,
    c0: f64,
}

fn moments(params: &ModelParams) -> (f64, f64) {
    let r = params.r;
    (
        (r * params.a_e - params.a_i) / r,
        (r * r * params.a_e - params.a_i) / (r * r),
    )
}

fn relation(params: &ModelParams, k: f64) -> Relation {
    let ModelParams {
        alpha,
        tau,
        nu,
        a_e,
        a_i,
        ..
    } = *params;
    let (m1, m2) = moments(params);
    let k2 = k * k;
    Relation {
        c4: tau / (nu * nu) * m2,
        c2: tau * (a_i - a_e) + (tau * k2 - alpha / (nu * nu)) * m2 + (alpha * tau + 1.0) / nu * m1,
        c0: alpha * ((a_e - a_i) - k2 * m2),
    }
}

impl Relation {
    fn eval(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        (self.c4 * w2 + self.c2) * w2 + self.c0
    }

    fn scale(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        (self.c4 * w2 * w2).abs().max((self.c2 * w2).abs()).max(self.c0.abs())
    }

    fn normalized(&self, omega: f64) -> f64 {
        let s = self.scale(omega);
        if s == 0.0 {
            0.0
        } else {
            self.eval(omega).abs() / s
        }
    }
}

/// Value of the dispersion polynomial at `(k, ω)`.
pub fn th_residual(params: &ModelParams, k: f64, omega: f64) -> f64 {
    relation(params, k).eval(omega)
}

/// `th_residual` divided by its largest term.
pub fn th_residual_normalized(params: &ModelParams, k: f64, omega: f64) -> f64 {
    relation(params, k).normalized(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// From the smaller root in `ω²`.
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega: f64,
    /// Normalized dispersion residual.
    pub residual: f64,
    pub branch: Option<Branch>,
}

/// Positive ω solving the relation at fixed `k`, in branch order low, high.
pub fn dispersion_omega_given_k(params: &ModelParams, k: f64) -> Result<Vec<DispersionPoint>> {
    params.validate()?;
    let rel = relation(params, k);
    let (_, m2) = moments(params);
    if m2.abs() <= DEGENERATE_TOL * params.a_e.abs().max(params.a_i.abs()) {
        return Err(FieldError::DegenerateLeading(
            "r² a_e = a_i: the ω⁴ coefficient vanishes".into(),
        ));
    }
    let (a, b, c) = (rel.c4, rel.c2, rel.c0);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    // cancellation-free quadratic roots
    let sq = disc.sqrt();
    let t = -0.5 * (b + b.signum() * sq);
    let mut w2 = if t == 0.0 { vec![0.0, 0.0] } else { vec![t / a, c / t] };
    w2.sort_by(f64::total_cmp);
    let branches = [Branch::Low, Branch::High];
    let mut out = Vec::new();
    for (i, &w) in w2.iter().enumerate() {
        if !(w > 0.0) || (i == 1 && w == w2[0]) {
            continue;
        }
        let omega = w.sqrt();
        out.push(DispersionPoint {
            k,
            omega,
            residual: rel.normalized(omega),
            branch: Some(branches[i]),
        });
    }
    Ok(out)
}

/// The positive `k` solving the relation at fixed `ω`, if any.
pub fn dispersion_k_given_omega(params: &ModelParams, omega: f64) -> Result<Option<DispersionPoint>> {
    params.validate()?;
    let singular = (params.alpha / params.tau).sqrt();
    if (omega.abs() - singular).abs() <= SINGULAR_WINDOW * singular {
        return Err(FieldError::SingularDirection { omega, singular });
    }
    let (_, m2) = moments(params);
    let slope = (params.tau * omega * omega - params.alpha) * m2;
    if slope == 0.0 {
        return Err(FieldError::DegenerateLeading("k² coefficient vanishes (r² a_e = a_i)".into()));
    }
    let k2 = -relation(params, 0.0).eval(omega) / slope;
    if !(k2 > 0.0) || !k2.is_finite() {
        return Ok(None);
    }
    let k = k2.sqrt();
    Ok(Some(DispersionPoint {
        k,
        omega,
        residual: th_residual_normalized(params, k, omega),
        branch: None,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThPlane {
    AlphaOmega,
    NuOmega,
    TauOmega,
    ROmega,
    AlphaK,
    NuK,
    TauK,
    RK,
}

impl ThPlane {
    pub const ALL: [ThPlane; 8] = [
        ThPlane::AlphaOmega,
        ThPlane::NuOmega,
        ThPlane::TauOmega,
        ThPlane::ROmega,
        ThPlane::AlphaK,
        ThPlane::NuK,
        ThPlane::TauK,
        ThPlane::RK,
    ];

    pub fn swept(&self) -> ParamName {
        match self {
            ThPlane::AlphaOmega | ThPlane::AlphaK => ParamName::Alpha,
            ThPlane::NuOmega | ThPlane::NuK => ParamName::Nu,
            ThPlane::TauOmega | ThPlane::TauK => ParamName::Tau,
            ThPlane::ROmega | ThPlane::RK => ParamName::R,
        }
    }

    /// True for planes whose ordinate is ω (and whose fixed mode is k).
    pub fn solves_omega(&self) -> bool {
        matches!(
            self,
            ThPlane::AlphaOmega | ThPlane::NuOmega | ThPlane::TauOmega | ThPlane::ROmega
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ThPlane::AlphaOmega => "alpha-omega",
            ThPlane::NuOmega => "nu-omega",
            ThPlane::TauOmega => "tau-omega",
            ThPlane::ROmega => "r-omega",
            ThPlane::AlphaK => "alpha-k",
            ThPlane::NuK => "nu-k",
            ThPlane::TauK => "tau-k",
            ThPlane::RK => "r-k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThCurvePoint {
    pub value: f64,
    #[serde(flatten)]
    pub point: DispersionPoint,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ThCurve {
    pub points: Vec<ThCurvePoint>,
    pub gaps: Vec<Gap>,
}

/// Dispersion points along `grid`. `mode` is the fixed `k` for ω-planes and
/// the fixed `ω` for k-planes.
pub fn trace_th_curve(
    plane: ThPlane,
    mode: f64,
    grid: &[f64],
    fixed: &ModelParams,
    tie_inhibition: bool,
) -> Result<ThCurve> {
    check_monotone(grid)?;
    if !(mode.is_finite() && mode != 0.0) {
        return Err(FieldError::InvalidConfig("fixed k or omega must be finite and nonzero".into()));
    }
    let name = plane.swept();
    let per_value: Vec<std::result::Result<Vec<ThCurvePoint>, Gap>> = grid
        .par_iter()
        .map(|&value| {
            let params = fixed.with(name, value, tie_inhibition);
            let solved = if plane.solves_omega() {
                dispersion_omega_given_k(&params, mode)
            } else {
                dispersion_k_given_omega(&params, mode).map(|p| p.into_iter().collect())
            };
            let gap = |reason: String| Gap { value, reason };
            match solved {
                Ok(points) => {
                    let points: Vec<ThCurvePoint> = points
                        .into_iter()
                        .filter(|p| p.k != 0.0 && p.omega != 0.0 && p.residual < POINT_TOL)
                        .map(|point| ThCurvePoint { value, point })
                        .collect();
                    if points.is_empty() {
                        Err(gap("no positive solution".into()))
                    } else {
                        Ok(points)
                    }
                }
                Err(e) => Err(gap(e.to_string())),
            }
        })
        .collect();
    let mut curve = ThCurve::default();
    for entry in per_value {
        match entry {
            Ok(points) => curve.points.extend(points),
            Err(gap) => curve.gaps.push(gap),
        }
    }
    Ok(curve)
}

/// Comparison of a dispersion point with the exact spectrum at the same k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCrossCheck {
    pub k: f64,
    pub omega: f64,
    /// Spectrum root closest to `iω`.
    pub nearest: Complex64,
    pub distance: f64,
    /// Root tolerance scaled by the condition number of the nearest root.
    pub bound: f64,
    pub pass: bool,
}

/// Looks for a root of the full characteristic polynomial near `iω` at `k`.
pub fn spectral_cross_check(params: &ModelParams, k: f64, omega: f64) -> Result<SpectralCrossCheck> {
    let s = spectrum(params, k)?;
    let poly = characteristic_polynomial(params, k)?;
    let target = Complex64::new(0.0, omega);
    let nearest = s
        .roots
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .expect("six roots");
    let distance = (nearest - target).norm();
    let slope = poly.derivative().eval_complex(nearest).norm();
    let cond = if slope > 0.0 {
        poly.monomial_scale(nearest) / slope
    } else {
        f64::INFINITY
    };
    let bound = ROOT_TOL * cond;
    Ok(SpectralCrossCheck {
        k,
        omega,
        nearest,
        distance,
        bound,
        pass: distance <= bound,
    })
}
