//! Fourier calculus on the torus `T = R / 2πZ`.
//!
//! Coefficients follow the integral convention `û(ξ) = ∫_T u(x) e^{-ixξ} dx`,
//! realised on `N` equispaced samples by the quadrature weight `2π/N`. With
//! this normalisation `∫|u|² = (1/2π) Σ |û(ξ)|²` and `(fg)^ = (1/2π) f̂ * ĝ`.
//!
//! Coefficients are stored in FFT order: index `i` holds `ξ = i` for
//! `i < N/2` and `ξ = i - N` otherwise. The Nyquist slot `ξ = -N/2` has no
//! Hermitian partner and is kept at zero.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Uniform collocation grid on the 2π-periodic torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    n_points: usize,
    dealias_cutoff: i64,
}

impl TorusGrid {
    pub const LENGTH: f64 = 2.0 * PI;

    /// Builds a grid with `n_points` samples; `n_points` must be a power of
    /// two and at least 8. The dealias cutoff is `floor(n_points / 3)`.
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::config(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        Ok(Self {
            n_points,
            dealias_cutoff: (n_points / 3) as i64,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        Self::LENGTH
    }

    pub fn dealias_cutoff(&self) -> i64 {
        self.dealias_cutoff
    }

    /// Largest positive resolvable frequency, `N/2 - 1`.
    pub fn max_frequency(&self) -> i64 {
        self.n_points as i64 / 2 - 1
    }

    pub fn x(&self, j: usize) -> f64 {
        Self::LENGTH * j as f64 / self.n_points as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Frequency stored at FFT index `i`.
    pub fn frequency(&self, i: usize) -> i64 {
        let n = self.n_points as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT index of frequency `xi`, if it lies in `[-N/2, N/2)`.
    pub fn index(&self, xi: i64) -> Option<usize> {
        let n = self.n_points as i64;
        if xi >= -n / 2 && xi < n / 2 {
            Some(xi.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }

    /// Frequencies in FFT order.
    pub fn frequencies(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n_points).map(move |i| self.frequency(i))
    }
}

/// Complex Fourier coefficients of a real field on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    /// Builds a field from a coefficient function evaluated on `0 <= ξ < N/2`;
    /// negative frequencies are filled by conjugation.
    pub fn from_positive<F>(grid: TorusGrid, mut coeff: F) -> Self
    where
        F: FnMut(i64) -> Complex64,
    {
        let mut field = Self::zeros(grid);
        let n = grid.n_points();
        field.coeffs[0] = Complex64::new(coeff(0).re, 0.0);
        for xi in 1..(n / 2) as i64 {
            let c = coeff(xi);
            field.coeffs[xi as usize] = c;
            field.coeffs[n - xi as usize] = c.conj();
        }
        field
    }

    /// Wraps raw FFT-ordered coefficients. The input is made exactly
    /// Hermitian and the Nyquist slot is cleared.
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::config(format!(
                "expected {} coefficients, got {}",
                grid.n_points(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::numeric("non-finite Fourier coefficient"));
        }
        let mut field = Self { grid, coeffs };
        field.symmetrize();
        Ok(field)
    }

    /// Forward transform of samples `u(x_j)`, `x_j = 2πj/N`.
    pub fn from_samples(grid: TorusGrid, samples: &[f64]) -> Result<Self> {
        to_spectral(grid, samples)
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at frequency `xi`; zero outside the resolvable band.
    pub fn coeff(&self, xi: i64) -> Complex64 {
        self.grid
            .index(xi)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// `û(0)`, which equals `∫ u dx`.
    pub fn mean_mode(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Spatial average `(1/2π) ∫ u dx`.
    pub fn spatial_mean(&self) -> f64 {
        self.coeffs[0].re / TorusGrid::LENGTH
    }

    /// Inverse transform to point values.
    pub fn to_physical(&self) -> Vec<f64> {
        from_spectral(self)
    }

    /// `∫ |u|² dx` computed from the coefficients.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / TorusGrid::LENGTH
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `û(-ξ) = conj(û(ξ))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n_points();
        let mut worst = self.coeffs[0].im.abs();
        for i in 1..n / 2 {
            worst = worst.max((self.coeffs[i] - self.coeffs[n - i].conj()).norm());
        }
        worst.max(self.coeffs[n / 2].norm())
    }

    /// Projects onto exactly Hermitian coefficients and clears Nyquist.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n_points();
        self.coeffs[0].im = 0.0;
        for i in 1..n / 2 {
            let avg = (self.coeffs[i] + self.coeffs[n - i].conj()) * 0.5;
            self.coeffs[i] = avg;
            self.coeffs[n - i] = avg.conj();
        }
        self.coeffs[n / 2] = Complex64::new(0.0, 0.0);
    }

    /// Coefficient-wise `symbol(ξ) · û(ξ)`.
    pub fn apply_multiplier<S>(&self, symbol: S) -> Result<SpectralField>
    where
        S: Fn(i64) -> Complex64,
    {
        let mut out = self.clone();
        let nyq = self.grid.nyquist_index();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if i == nyq {
                continue;
            }
            let xi = self.grid.frequency(i);
            let s = symbol(xi);
            if !s.re.is_finite() || !s.im.is_finite() {
                return Err(Error::numeric(format!(
                    "multiplier is not finite at frequency {xi}"
                )));
            }
            *c *= s;
        }
        Ok(out)
    }

    /// Dealiased product: exact convolution of the full spectra (zero-padded
    /// to twice the grid) with every output frequency above the cutoff zeroed.
    pub fn product_dealiased(&self, other: &SpectralField) -> Result<SpectralField> {
        if self.grid != other.grid {
            return Err(Error::config("product of fields on different grids"));
        }
        let grid = self.grid;
        let n = grid.n_points();
        let m = 2 * n;
        let fine_f = pad_to_physical(self, m);
        let fine_g = pad_to_physical(other, m);
        let mut buf: Vec<Complex64> = fine_f
            .iter()
            .zip(&fine_g)
            .map(|(a, b)| Complex64::new(a * b, 0.0))
            .collect();
        plan_forward(m).process(&mut buf);
        let weight = TorusGrid::LENGTH / m as f64;
        let cutoff = grid.dealias_cutoff();
        let mut out = SpectralField::zeros(grid);
        for xi in -cutoff..=cutoff {
            let src = xi.rem_euclid(m as i64) as usize;
            let dst = grid.index(xi).expect("cutoff lies in band");
            out.coeffs[dst] = buf[src] * weight;
        }
        out.symmetrize();
        Ok(out)
    }

    /// Zeroes every frequency with `|ξ| > cutoff`.
    pub fn truncate(&self, cutoff: i64) -> SpectralField {
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            if self.grid.frequency(i).abs() > cutoff {
                out.coeffs[i] = Complex64::new(0.0, 0.0);
            }
        }
        out.coeffs[self.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        out
    }

    /// Re-expresses the field on a different grid: coefficients are copied
    /// where both grids resolve them and dropped otherwise.
    pub fn resample(&self, grid: TorusGrid) -> SpectralField {
        let cut = self.grid.max_frequency().min(grid.max_frequency());
        SpectralField::from_positive(grid, |xi| {
            if xi <= cut {
                self.coeff(xi)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// Adds a constant `c` to the physical field, i.e. `2πc` to `û(0)`.
    pub fn add_constant(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs[0] += Complex64::new(TorusGrid::LENGTH * c, 0.0);
        out
    }

    /// Physical translation `u(x) ↦ u(x + shift)`, applied as the exact
    /// phase `e^{iξ·shift}`.
    pub fn translate(&self, shift: f64) -> SpectralField {
        self.apply_multiplier(|xi| Complex64::from_polar(1.0, xi as f64 * shift))
            .expect("unit phases are finite")
    }

    fn zip_with<F>(&self, other: &SpectralField, f: F) -> Result<SpectralField>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.grid != other.grid {
            return Err(Error::config("fields live on different grids"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }
}

/// Forward transform with quadrature weight `2π/N`.
pub fn to_spectral(grid: TorusGrid, samples: &[f64]) -> Result<SpectralField> {
    let n = grid.n_points();
    if samples.len() != n {
        return Err(Error::config(format!(
            "expected {n} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite sample"));
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan_forward(n).process(&mut buf);
    let weight = TorusGrid::LENGTH / n as f64;
    buf.iter_mut().for_each(|c| *c *= weight);
    let mut field = SpectralField { grid, coeffs: buf };
    field.symmetrize();
    Ok(field)
}

/// Inverse of [`to_spectral`]: `u(x_j) = (1/2π) Σ_ξ û(ξ) e^{i x_j ξ}`.
pub fn from_spectral(field: &SpectralField) -> Vec<f64> {
    let n = field.grid.n_points();
    let mut buf = field.coeffs.clone();
    plan_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / TorusGrid::LENGTH).collect()
}

/// Point values of `field` on a finer grid of `m >= N` points.
pub(crate) fn pad_to_physical(field: &SpectralField, m: usize) -> Vec<f64> {
    let grid = field.grid;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, c) in field.coeffs.iter().enumerate() {
        if i == grid.nyquist_index() {
            continue;
        }
        let xi = grid.frequency(i);
        buf[xi.rem_euclid(m as i64) as usize] = *c;
    }
    plan_inverse(m).process(&mut buf);
    buf.iter().map(|c| c.re / TorusGrid::LENGTH).collect()
}

/// Common reality-preserving multipliers.
pub mod multipliers {
    use num_complex::Complex64;

    /// `D^β`: `|ξ|^β`, with the zero mode mapped to zero for `β > 0`.
    pub fn fractional_derivative(beta: f64) -> impl Fn(i64) -> Complex64 {
        move |xi| {
            if xi == 0 {
                if beta == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                Complex64::new((xi.abs() as f64).powf(beta), 0.0)
            }
        }
    }

    /// `∂x`: `iξ`.
    pub fn derivative() -> impl Fn(i64) -> Complex64 {
        |xi| Complex64::new(0.0, xi as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n).unwrap()
    }

    fn sample<F: Fn(f64) -> f64>(g: TorusGrid, f: F) -> Vec<f64> {
        g.points().into_iter().map(f).collect()
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(TorusGrid::new(4).is_err());
        assert!(TorusGrid::new(48).is_err());
        assert_eq!(grid(64).dealias_cutoff(), 21);
        assert_eq!(grid(256).dealias_cutoff(), 85);
    }

    #[test]
    fn constant_maps_to_two_pi() {
        let g = grid(16);
        let f = to_spectral(g, &[1.0; 16]).unwrap();
        assert!((f.coeff(0).re - 2.0 * PI).abs() < 1e-14);
        for xi in 1..8 {
            assert!(f.coeff(xi).norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_coefficients_are_pi() {
        let g = grid(32);
        let f = to_spectral(g, &sample(g, f64::cos)).unwrap();
        assert!((f.coeff(1) - Complex64::new(PI, 0.0)).norm() < 1e-13);
        assert!((f.coeff(-1) - Complex64::new(PI, 0.0)).norm() < 1e-13);
        assert!(f.coeff(2).norm() < 1e-13);
    }

    #[test]
    fn roundtrip_band_limited() {
        let g = grid(64);
        let u = sample(g, |x| (3.0 * x).cos() + 0.2 * (5.0 * x).sin());
        let back = to_spectral(g, &u).unwrap().to_physical();
        let err = u
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn length_mismatch_is_config_error() {
        let g = grid(16);
        assert!(matches!(to_spectral(g, &[0.0; 8]), Err(Error::Config(_))));
    }

    #[test]
    fn multiplier_examples() {
        let g = grid(32);
        let c4 = to_spectral(g, &sample(g, |x| (4.0 * x).cos())).unwrap();
        let out = c4
            .apply_multiplier(multipliers::fractional_derivative(0.5))
            .unwrap()
            .to_physical();
        let want = sample(g, |x| 2.0 * (4.0 * x).cos());
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }

        let c1 = to_spectral(g, &sample(g, f64::cos)).unwrap();
        let out = c1
            .apply_multiplier(multipliers::derivative())
            .unwrap()
            .to_physical();
        for (x, v) in g.points().iter().zip(&out) {
            assert!((v + x.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let g = grid(16);
        let f = to_spectral(g, &sample(g, f64::cos)).unwrap();
        let r = f.apply_multiplier(|xi| Complex64::new(1.0 / xi as f64, 0.0));
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn product_examples() {
        let g = grid(32);
        let c = to_spectral(g, &sample(g, f64::cos)).unwrap();
        let p = c.product_dealiased(&c).unwrap();
        assert!((p.coeff(0).re - PI).abs() < 1e-13);
        assert!((p.coeff(2).re - PI / 2.0).abs() < 1e-13);
        assert!((p.coeff(-2).re - PI / 2.0).abs() < 1e-13);
        assert!(p.coeff(1).norm() < 1e-13);

        let z = SpectralField::zeros(g);
        assert_eq!(c.product_dealiased(&z).unwrap().max_abs_coeff(), 0.0);

        let k = g.dealias_cutoff();
        let top = SpectralField::from_positive(g, |xi| {
            if xi == k {
                Complex64::new(1.0, 0.3)
            } else {
                Complex64::default()
            }
        });
        let p = top.product_dealiased(&top).unwrap();
        assert_eq!(p.coeff(2 * k.min(g.max_frequency())), Complex64::default());
        assert!(g.index(2 * k).is_none() || p.coeff(2 * k).norm() == 0.0);
        // the difference mode survives
        assert!(p.coeff(0).re > 0.0);
    }

    #[test]
    fn grid_mismatch_in_product() {
        let a = SpectralField::zeros(grid(16));
        let b = SpectralField::zeros(grid(32));
        assert!(matches!(a.product_dealiased(&b), Err(Error::Config(_))));
    }

    #[test]
    fn translate_matches_shifted_samples() {
        let g = grid(32);
        let f = to_spectral(g, &sample(g, |x| (2.0 * x).sin() + 0.5 * x.cos())).unwrap();
        let shifted = f.translate(0.7).to_physical();
        for (x, v) in g.points().iter().zip(&shifted) {
            let y = x + 0.7;
            assert!((v - ((2.0 * y).sin() + 0.5 * y.cos())).abs() < 1e-13);
        }
    }
}
