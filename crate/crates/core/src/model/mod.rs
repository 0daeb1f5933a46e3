//! Model parameters, spatial kernel, transfer function and derived scalars.

pub mod kernel;
pub mod params;
pub mod quadrature;
pub mod transfer;

pub use kernel::{KernelShape, SpatialKernel};
pub use params::{derived, equilibrium, DerivedQuantities, KernelSpec, ModelParams, ParamName};
pub use transfer::Sigmoid;
