//! Simulation and estimation toolkit for reflected SDEs driven by fractional
//! Brownian motion inside a moving interval constraint, together with the
//! kernel-based nonparametric estimator of the deterministic trend and the
//! Monte Carlo machinery used to verify its convergence rate and asymptotic
//! distribution.

pub mod dsl;
pub mod estimator;
pub mod experiments;
pub mod error;
pub mod fbm;
pub mod kernels;
pub mod grid;
pub mod reflect;
pub mod trend;
mod quad;

pub use error::{Error, ErrorKind, Result};
pub use grid::Grid;
