//! Neural field with an exponential temporal kernel and distance-dependent
//! transmission delays.
//!
//! * [`model`]: parameters, connectivity kernel, transfer function.
//! * [`linear`]: characteristic equation, spectra, sufficient stability bound.
//! * [`hopf`]: homogeneous (k = 0) oscillatory instability.
//! * [`turing`]: the Turing-Hopf dispersion relation.
//! * [`sim`]: delayed field integration and pattern metrics.
//! * [`cli`]: configuration files, sweeps and output writers.

pub mod cli;
pub mod error;
pub mod model;

pub use error::{FieldError, Result};
pub mod hopf;
pub mod linear;
pub mod poly;
pub mod sim;
pub mod turing;

#[cfg(test)]
mod properties;
