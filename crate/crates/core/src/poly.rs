//! Real polynomials and their complex roots.
//!
//! Roots come from the eigenvalues of the companion matrix (real Schur
//! decomposition), followed by Newton polishing against the original
//! coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FieldError, Result};

const SCHUR_MAX_ITER: usize = 10_000;
const POLISH_STEPS: usize = 4;

/// Real polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing (highest-degree) exact zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x - root`
    pub fn linear_factor(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| j as f64 * c)
                .collect(),
        )
    }

    /// Largest monomial magnitude `max_j |c_j| |z|^j`, the scale used to
    /// normalize residuals.
    pub fn monomial_scale(&self, z: Complex64) -> f64 {
        let m = z.norm();
        let mut power = 1.0;
        let mut scale: f64 = 0.0;
        for &c in &self.coeffs {
            scale = scale.max(c.abs() * power);
            power *= m;
        }
        scale
    }

    /// `|p(z)|` divided by the largest monomial magnitude at `z`.
    pub fn normalized_residual(&self, z: Complex64) -> f64 {
        let scale = self.monomial_scale(z);
        if scale == 0.0 {
            return 0.0;
        }
        self.eval_complex(z).norm() / scale
    }

    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        let lead = self.leading();
        if lead == 0.0 {
            return Err(FieldError::DegenerateLeading("zero polynomial has no roots".into()));
        }
        // zero roots are factored out exactly
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let reduced = &self.coeffs[zeros..];
        let m = reduced.len() - 1;
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        if m == 0 {
            return Ok(roots);
        }

        // rescale x = s y so the monic coefficients have comparable size
        let s = (reduced[0] / lead).abs().powf(1.0 / m as f64);
        let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
        let mut companion = DMatrix::<f64>::zeros(m, m);
        for i in 1..m {
            companion[(i, i - 1)] = 1.0;
        }
        for j in 0..m {
            // monic coefficient of y^j: c_j s^j / (lead s^m)
            companion[(j, m - 1)] = -reduced[j] / lead * s.powi(j as i32 - m as i32);
        }
        let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
            FieldError::RootFinder(format!(
                "companion eigenvalues did not converge in {SCHUR_MAX_ITER} iterations (degree {n})"
            ))
        })?;
        let eig = schur.complex_eigenvalues();

        let dp = self.derivative();
        for y in eig.iter() {
            let z0 = Complex64::new(y.re * s, y.im * s);
            roots.push(self.polish(&dp, z0));
        }
        Ok(roots)
    }

    /// Newton steps, kept only while they reduce the residual.
    fn polish(&self, dp: &RealPolynomial, mut z: Complex64) -> Complex64 {
        let mut res = self.eval_complex(z).norm();
        for _ in 0..POLISH_STEPS {
            if res == 0.0 {
                break;
            }
            let d = dp.eval_complex(z);
            if d.norm() == 0.0 {
                break;
            }
            let cand = z - self.eval_complex(z) / d;
            let cand_res = self.eval_complex(cand).norm();
            if !(cand_res < res) {
                break;
            }
            z = cand;
            res = cand_res;
        }
        z
    }
}

impl std::ops::Mul for &RealPolynomial {
    type Output = RealPolynomial;

    fn mul(self, rhs: &RealPolynomial) -> RealPolynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial::new(out)
    }
}

impl std::ops::Add for &RealPolynomial {
    type Output = RealPolynomial;

    fn add(self, rhs: &RealPolynomial) -> RealPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPolynomial::new(
            (0..n)
                .map(|j| self.coeffs.get(j).unwrap_or(&0.0) + rhs.coeffs.get(j).unwrap_or(&0.0))
                .collect(),
        )
    }
}

impl std::ops::Sub for &RealPolynomial {
    type Output = RealPolynomial;

    fn sub(self, rhs: &RealPolynomial) -> RealPolynomial {
        self + &rhs.scale(-1.0)
    }
}

impl RealPolynomial {
    pub fn scale(&self, a: f64) -> RealPolynomial {
        RealPolynomial::new(self.coeffs.iter().map(|c| c * a).collect())
    }
}
