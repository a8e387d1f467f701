//! Seeded initial data.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::littlewood_paley::sobolev_norm;
use crate::spectral::{SpectralField, TorusGrid};

/// Mean-zero real field with `û(ξ) = ⟨ξ⟩^{-s-1}(g1 + i g2)` on the dealiased
/// band (`g` seeded standard normals), rescaled to `‖u‖_{H^s} = norm_target`.
pub fn random_smooth_datum(grid: TorusGrid, s: f64, norm_target: f64, seed: u64) -> Result<SpectralField> {
    if !(norm_target > 0.0) || !norm_target.is_finite() {
        return Err(Error::domain(format!("norm target must be positive, got {norm_target}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cut = grid.dealias_cutoff();
    let u = SpectralField::from_positive(grid, |xi| {
        if xi == 0 || xi > cut {
            return Complex64::new(0.0, 0.0);
        }
        let g1: f64 = StandardNormal.sample(&mut rng);
        let g2: f64 = StandardNormal.sample(&mut rng);
        let w = (1.0 + (xi * xi) as f64).powf(-(s + 1.0) / 2.0);
        Complex64::new(w * g1, w * g2)
    });
    let norm = sobolev_norm(&u, s);
    if !(norm > 0.0) {
        return Err(Error::numeric("random datum has zero norm"));
    }
    Ok(u.scale(norm_target / norm))
}

/// `cos x + cos(p x)` rescaled to `‖u‖_{H^s} = norm_target`.
pub fn packet_datum(grid: TorusGrid, p: i64, s: f64, norm_target: f64) -> Result<SpectralField> {
    if p < 2 || p > grid.dealias_cutoff() {
        return Err(Error::config(format!(
            "packet frequency {p} must lie in [2, {}]",
            grid.dealias_cutoff()
        )));
    }
    let u = SpectralField::from_positive(grid, |xi| {
        if xi == 1 || xi == p {
            Complex64::new(std::f64::consts::PI, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(u.scale(norm_target / sobolev_norm(&u, s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_mean_zero_deterministic() {
        let g = TorusGrid::new(128).unwrap();
        let a = random_smooth_datum(g, 0.85, 1.0, 3).unwrap();
        assert!((sobolev_norm(&a, 0.85) - 1.0).abs() < 1e-10);
        assert_eq!(a.coeff(0), Complex64::new(0.0, 0.0));
        assert!(a.hermitian_defect() == 0.0);
        let b = random_smooth_datum(g, 0.85, 1.0, 3).unwrap();
        assert_eq!(a, b);
        assert!(random_smooth_datum(g, 0.85, 0.0, 3).is_err());
    }
}
