//! Sigmoid firing-rate transfer function.

/// Exponent clamp. `exp(700)` is finite in f64, so the sigmoid saturates
/// smoothly instead of overflowing for large potentials.
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Logistic transfer `1 / (1 + exp(-gain (v - theta)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigmoid {
    pub gain: f64,
    pub theta: f64,
}

impl Default for Sigmoid {
    fn default() -> Self {
        Self {
            gain: 1.8,
            theta: 3.0,
        }
    }
}

impl Sigmoid {
    pub fn new(gain: f64, theta: f64) -> Self {
        Self { gain, theta }
    }

    #[inline]
    pub fn value(&self, v: f64) -> f64 {
        let x = (-self.gain * (v - self.theta)).clamp(-EXPONENT_CLAMP, EXPONENT_CLAMP);
        1.0 / (1.0 + x.exp())
    }

    /// `gain * F * (1 - F)`.
    #[inline]
    pub fn derivative(&self, v: f64) -> f64 {
        let f = self.value(v);
        self.gain * f * (1.0 - f)
    }
}
