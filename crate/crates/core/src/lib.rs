pub mod ball;
pub mod calculus;
pub mod domain;
pub mod error;
pub mod functions;
pub mod kernels;
pub mod oscillation;
pub mod quadrature;
pub mod sampling;
pub mod special;

pub use domain::{rho, DomainConfig, TubePoint};
pub use error::{Result, TubeError};
pub use functions::FunctionHandle;
pub use quadrature::{IntegralResult, QuadratureSpec};
