//! Homogeneous (k = 0) oscillatory instability.
//!
//! At `k = 0` the sextic characteristic polynomial has the roots `-ν` and
//! `-νr`; the remaining quartic crosses the imaginary axis at `iω_c` when
//! `a4 ω⁴ + a2 ω² + a0 = 0` and `b3 ω² + b1 = 0`. Eliminating `ω_c` leaves a
//! quartic `g(ν)` in the transmission speed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FieldError, Result};
use crate::model::{ModelParams, ParamName};
use crate::poly::RealPolynomial;

/// Tolerance on `|u4|` (relative to the largest u-coefficient).
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Normalized `|g(ν)|` accepted for a polished root.
pub const ROOT_TOL: f64 = 1e-10;
/// Normalized `|a4 ω⁴ + a2 ω² + a0|` below which a point is on the curve.
pub const CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfCoefficients {
    /// Sextic at k = 0, ascending.
    pub q: [f64; 7],
    /// Quartic factor, ascending.
    pub p: [f64; 5],
    pub a4: f64,
    pub a2: f64,
    pub a0: f64,
    pub b3: f64,
    pub b1: f64,
    /// Quartic in ν, ascending.
    pub u: [f64; 5],
}

impl HopfCoefficients {
    pub fn sextic(&self) -> RealPolynomial {
        RealPolynomial::new(self.q.to_vec())
    }

    pub fn quartic(&self) -> RealPolynomial {
        RealPolynomial::new(self.p.to_vec())
    }

    /// `g(ν)` with the leading coefficient normalized to one.
    pub fn g(&self) -> RealPolynomial {
        RealPolynomial::new(self.u.iter().map(|c| c / self.u[4]).collect())
    }

    /// `|a4 ω⁴ + a2 ω² + a0|` over its largest term.
    pub fn consistency_residual(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        let terms = [self.a4 * w2 * w2, self.a2 * w2, self.a0];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        terms.iter().sum::<f64>().abs() / scale
    }
}

pub fn hopf_coefficients(params: &ModelParams) -> Result<HopfCoefficients> {
    params.validate()?;
    if !params.kernel().is_mexican_hat() {
        return Err(FieldError::UnsupportedKernel(
            "Hopf coefficients need the exponential kernel".into(),
        ));
    }
    let ModelParams {
        alpha: al,
        tau: ta,
        nu,
        r,
        a_e,
        a_i,
        ..
    } = *params;
    let be = params.beta();
    let nu2 = nu * nu;
    let nu3 = nu2 * nu;
    let nu4 = nu2 * nu2;
    let r2 = r * r;

    let q = [
        al * nu4 * r2,
        (al * ta + 1.0 - (a_e - a_i) * be) * r2 * nu4 + 2.0 * al * (r + 1.0) * r * nu3,
        ta * r2 * nu4
            + ((2.0 * al * ta + 2.0 - (a_e - 2.0 * a_i) * be) * r2 + (2.0 * al * ta + 2.0 + (-2.0 * a_e + a_i) * be) * r)
                * nu3
            + al * (1.0 + r2 + 4.0 * r) * nu2,
        2.0 * ta * (r + 1.0) * r * nu3
            // the β r term is -2β(a_e - a_i) r; with -4β(a_e - a_i) r the
            // sextic would no longer vanish at λ = -ν
            + ((al * ta + a_i * be + 1.0) * r2 + (4.0 * (al * ta + 1.0) - 2.0 * (a_e - a_i) * be) * r + al * ta + 1.0
                - a_e * be)
                * nu2
            + 2.0 * al * (r + 1.0) * nu,
        2.0 * ta * (0.5 + 0.5 * r2 + 2.0 * r) * nu2
            + ((a_i * be + 2.0 * al * ta + 2.0) * r + 2.0 * al * ta - a_e * be + 2.0) * nu
            + al,
        2.0 * ta * (r + 1.0) * nu + al * ta + 1.0,
        ta,
    ];

    let p = [
        al * nu2 * r,
        -a_e * be * nu2 * r + a_i * be * nu2 * r + al * nu2 * r * ta + al * nu * r + nu2 * r + al * nu,
        nu * a_i * be * r + nu * al * r * ta + ta * nu2 * r - nu * a_e * be + nu * al * ta + al + (r + 1.0) * nu,
        ta * nu * r + al * ta + ta * nu + 1.0,
        ta,
    ];

    let a4 = ta;
    let a2 = -nu * a_i * be * r - nu * al * r * ta - ta * nu2 * r + nu * a_e * be - nu * al * ta - al - (r + 1.0) * nu;
    let a0 = al * nu2 * r;
    let b3 = -ta * nu * r - al * ta - ta * nu - 1.0;
    let b1 = -a_e * be * nu2 * r + a_i * be * nu2 * r + al * nu2 * r * ta + al * nu * r + nu2 * r + al * nu;

    let d = al * ta + 1.0 - be * (a_e - a_i);
    let ab = a_i * be + al * ta + 1.0;
    let eb = -a_e * be + al * ta + 1.0;
    let bracket = ta * ta * al * al - (-3.0 + (a_e - a_i) * be) * al * ta + 1.0 + (-a_e + a_i) * be;
    let u = [
        al * al * (al * ta + 1.0) * (r + 1.0),
        al * (al * ta + 1.0)
            * (ab * r2 + (2.0 * al * ta + 2.0 + (-2.0 * a_e + 2.0 * a_i) * be) * r + al * ta - a_e * be + 1.0),
        al * ta * ab * r2 * r + ab * bracket * r2 + eb * bracket * r + al * ta * eb,
        ta * (ab * r2 * r + (2.0 * al * ta + 2.0) * r2 + eb * r) * d,
        r2 * ta * ta * (r + 1.0) * d,
    ];

    Ok(HopfCoefficients {
        q,
        p,
        a4,
        a2,
        a0,
        b3,
        b1,
        u,
    })
}

/// Critical frequency `ω_c = sqrt(-b1/b3)` in rad/time.
pub fn hopf_omega(params: &ModelParams) -> Result<f64> {
    let h = hopf_coefficients(params)?;
    if !(h.b1 > 0.0) {
        return Err(FieldError::NoHopfFrequency { b1: h.b1 });
    }
    Ok((-h.b1 / h.b3).sqrt())
}

/// `ατ + 1 - β(a_e - a_i)`; negative values force a positive root of `g`.
pub fn leading_factor(params: &ModelParams) -> f64 {
    params.alpha * params.tau + 1.0 - params.beta() * (params.a_e - params.a_i)
}

/// Positive real roots of `g(ν)`, ascending. `params.nu` is ignored.
pub fn hopf_nu_roots(params: &ModelParams) -> Result<Vec<f64>> {
    let h = hopf_coefficients(params)?;
    let scale = h.u.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if h.u[4].abs() <= DEGENERATE_TOL * scale {
        return Err(FieldError::DegenerateLeading(format!(
            "u4 = {:.3e} vanishes (alpha tau + 1 = beta (a_e - a_i))",
            h.u[4]
        )));
    }
    let g = h.g();
    let dg = g.derivative();
    let mut out: Vec<f64> = Vec::new();
    for z in g.roots()? {
        if z.im.abs() > 1e-7 * z.norm().max(1.0) || z.re <= 0.0 {
            continue;
        }
        let nu = polish_real(&g, &dg, z.re);
        if nu > 0.0 && g.normalized_residual(nu.into()) < ROOT_TOL {
            out.push(nu);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());

    if out.is_empty() && h.u[0] / h.u[4] < 0.0 {
        // g(0) < 0 and g → +∞: bracket and bisect
        let mut hi = 1.0;
        while g.eval(hi) <= 0.0 && hi < 1e12 {
            hi *= 2.0;
        }
        let root = bisect(|x| g.eval(x), 0.0, hi);
        out.push(polish_real(&g, &dg, root));
    }
    Ok(out)
}

fn polish_real(g: &RealPolynomial, dg: &RealPolynomial, mut x: f64) -> f64 {
    for _ in 0..8 {
        let d = dg.eval(x);
        if d == 0.0 {
            break;
        }
        let next = x - g.eval(x) / d;
        if !(g.eval(next).abs() < g.eval(x).abs()) {
            break;
        }
        x = next;
    }
    x
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfRegion {
    /// `β(a_e - a_i) - (ατ + 1)`
    pub discriminant: f64,
    /// `α(1 + r) / (r · discriminant)` when the discriminant is positive.
    pub nu_bound: Option<f64>,
    pub in_region: bool,
}

pub fn hopf_region(params: &ModelParams) -> Result<HopfRegion> {
    params.validate()?;
    let discriminant = -leading_factor(params);
    let nu_bound = (discriminant > 0.0).then(|| params.alpha * (1.0 + params.r) / (params.r * discriminant));
    Ok(HopfRegion {
        discriminant,
        nu_bound,
        in_region: nu_bound.is_some_and(|b| params.nu < b),
    })
}

/// Value of `name` in `[lo, hi]` where the region discriminant changes sign,
/// located by scanning `steps` cells and bisecting the first bracket.
pub fn discriminant_crossing(params: &ModelParams, name: ParamName, lo: f64, hi: f64, steps: usize) -> Option<f64> {
    let f = |x: f64| -leading_factor(&params.with(name, x, false));
    let h = (hi - lo) / steps as f64;
    (0..steps).find_map(|j| {
        let a = lo + j as f64 * h;
        let b = a + h;
        ((f(a) < 0.0) != (f(b) < 0.0)).then(|| bisect(f, a, b))
    })
}

/// Parameter plane of a Hopf curve: the swept parameter against ν.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HopfPlane {
    AlphaNu,
    TauNu,
    RNu,
}

impl HopfPlane {
    pub fn swept(&self) -> ParamName {
        match self {
            HopfPlane::AlphaNu => ParamName::Alpha,
            HopfPlane::TauNu => ParamName::Tau,
            HopfPlane::RNu => ParamName::R,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "alpha-nu" => Some(HopfPlane::AlphaNu),
            "tau-nu" => Some(HopfPlane::TauNu),
            "r-nu" => Some(HopfPlane::RNu),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            HopfPlane::AlphaNu => "alpha-nu",
            HopfPlane::TauNu => "tau-nu",
            HopfPlane::RNu => "r-nu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub param: ParamName,
    pub value: f64,
    pub nu_critical: f64,
    pub omega_c: f64,
    pub consistency_residual: f64,
    pub in_region: bool,
}

/// A swept value with no emitted point, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub value: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HopfCurve {
    pub points: Vec<HopfPoint>,
    pub gaps: Vec<Gap>,
}

pub(crate) fn check_monotone(grid: &[f64]) -> Result<()> {
    let inc = grid.windows(2).all(|w| w[1] > w[0]);
    let dec = grid.windows(2).all(|w| w[1] < w[0]);
    if grid.iter().any(|x| !x.is_finite()) || !(inc || dec) {
        return Err(FieldError::InvalidConfig("sweep grid must be finite and strictly monotone".into()));
    }
    Ok(())
}

/// Hopf points `(value, ν)` along `grid`. With `tie_inhibition`, `a_i`
/// follows `a_e / r` at every point.
pub fn trace_hopf_curve(plane: HopfPlane, grid: &[f64], fixed: &ModelParams, tie_inhibition: bool) -> Result<HopfCurve> {
    check_monotone(grid)?;
    let name = plane.swept();
    let per_value: Vec<(Vec<HopfPoint>, Option<Gap>)> = grid
        .par_iter()
        .map(|&value| {
            let params = fixed.with(name, value, tie_inhibition);
            match curve_points(&params, name, value) {
                Ok(points) if points.is_empty() => (
                    points,
                    Some(Gap {
                        value,
                        reason: "no consistent positive root".into(),
                    }),
                ),
                Ok(points) => (points, None),
                Err(e) => (
                    Vec::new(),
                    Some(Gap {
                        value,
                        reason: e.to_string(),
                    }),
                ),
            }
        })
        .collect();
    let mut curve = HopfCurve::default();
    for (points, gap) in per_value {
        curve.points.extend(points);
        curve.gaps.extend(gap);
    }
    Ok(curve)
}

fn curve_points(params: &ModelParams, name: ParamName, value: f64) -> Result<Vec<HopfPoint>> {
    let mut points = Vec::new();
    for nu in hopf_nu_roots(params)? {
        let at = ModelParams { nu, ..*params };
        let h = hopf_coefficients(&at)?;
        if !(h.b1 > 0.0) {
            continue;
        }
        let omega_c = (-h.b1 / h.b3).sqrt();
        let consistency_residual = h.consistency_residual(omega_c);
        if consistency_residual < CONSISTENCY_TOL {
            points.push(HopfPoint {
                param: name,
                value,
                nu_critical: nu,
                omega_c,
                consistency_residual,
                in_region: hopf_region(&at)?.in_region,
            });
        }
    }
    Ok(points)
}
