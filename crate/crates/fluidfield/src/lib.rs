pub mod cli;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod gaussfield;
pub mod kernel;
pub mod network;
pub mod trajectory;

pub use error::{Error, Result};
pub use kernel::{bessel_j0, SpatialKernel};
