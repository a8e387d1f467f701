//! Pseudo-spectral solver and numerical-verification toolkit for the periodic
//! dispersion-generalized Benjamin–Ono equation
//!
//! ```text
//! ∂t u + ∂x D^α u = ∂x(u²),   x ∈ T = R/2πZ,
//! ```
//!
//! with dispersion relation `ω(ξ) = -ξ|ξ|^α` (or any admissible odd
//! multiplier). The crate bundles the torus Fourier calculus, Littlewood–Paley
//! machinery, resonance and symbol families, discrete convolution estimates,
//! an ETDRK4 time integrator and scenario probes.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod io;
pub mod littlewood_paley;
pub mod resonance;
pub mod solver;
pub mod spectral;
pub mod stats;

pub use dispersion::DispersionSpec;
pub use error::{Error, Result};
pub use spectral::{SpectralField, TorusGrid};

/// Crate version embedded in exported files.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
