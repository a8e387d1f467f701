use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionSpec;
use crate::littlewood_paley::sobolev_norm;
use crate::spectral::{pad_to_physical, SpectralField, TorusGrid};

/// Conserved quantities and block norms of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    /// `û(0) = ∫ u dx`.
    pub mean: f64,
    /// `∫ u² dx`.
    pub mass: f64,
    /// `(1/4π) Σ (-ω(ξ)/ξ) |û(ξ)|² - (1/3) ∫ u³ dx`; for the fractional family
    /// the symbol is `|ξ|^α`.
    pub hamiltonian: f64,
    /// Block Sobolev norms, aligned with the configured `s` values.
    pub sobolev: Vec<f64>,
}

/// `∫ u³ dx`, exact for band-limited `u` (quadrature on a doubled grid).
pub fn cubic_integral(u: &SpectralField) -> f64 {
    let m = 2 * u.grid().n_points();
    let vals = pad_to_physical(u, m);
    vals.iter().map(|v| v * v * v).sum::<f64>() * TorusGrid::LENGTH / m as f64
}

/// `∫ u⁴ dx`, exact for band-limited `u` (quadrature on a doubled grid).
pub fn quartic_integral(u: &SpectralField) -> f64 {
    let m = 2 * u.grid().n_points();
    let vals = pad_to_physical(u, m);
    vals.iter().map(|v| v.powi(4)).sum::<f64>() * TorusGrid::LENGTH / m as f64
}

/// Quadratic part of the Hamiltonian, `(1/4π) Σ (-ω(ξ)/ξ) |û(ξ)|²`.
pub fn quadratic_energy(u: &SpectralField, spec: &DispersionSpec) -> f64 {
    let grid = u.grid();
    let mut acc = 0.0;
    for (i, c) in u.coeffs().iter().enumerate() {
        let xi = grid.frequency(i);
        if xi == 0 || i == grid.nyquist_index() {
            continue;
        }
        let x = xi as f64;
        acc += -spec.omega(x) / x * c.norm_sqr();
    }
    acc / (2.0 * TorusGrid::LENGTH)
}

pub fn hamiltonian(u: &SpectralField, spec: &DispersionSpec) -> f64 {
    quadratic_energy(u, spec) - cubic_integral(u) / 3.0
}

pub fn diagnostics(u: &SpectralField, spec: &DispersionSpec, s_list: &[f64], t: f64) -> Diagnostics {
    Diagnostics {
        t,
        mean: u.mean_mode(),
        mass: u.l2_norm_sq(),
        hamiltonian: hamiltonian(u, spec),
        sobolev: s_list.iter().map(|&s| sobolev_norm(u, s)).collect(),
    }
}
