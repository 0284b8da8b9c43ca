//! Numerical laboratory for Colding-Minicozzi kappa-entropies of immersed
//! submanifolds in Euclidean and hyperbolic model spaces: heat-kernel
//! family evaluation, Gaussian kappa-densities and entropies, and the
//! small-time / small-radius expansions verified against analytically
//! computed curvature quantities.

pub mod ambient;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod fitting;
pub mod functional;
pub mod opt;
pub mod kernels;
pub mod quad;
pub mod submanifold;

pub use error::{Error, Result};
