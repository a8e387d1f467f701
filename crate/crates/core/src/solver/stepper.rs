//! Exponential integrators for `v̂_t = L(ξ) v̂ + N̂(v)` with diagonal,
//! purely imaginary `L`.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::SpectralField;

use super::Integrator;

const CONTOUR_POINTS: usize = 32;

/// Per-frequency coefficients for one step size.
#[derive(Debug, Clone)]
pub(crate) struct Stepper {
    integrator: Integrator,
    h: f64,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

/// Contour mean of `g` over the circle of radius 1 around `z`.
fn contour_mean<G: Fn(Complex64) -> Complex64>(z: Complex64, g: G) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..CONTOUR_POINTS {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        acc += g(z + Complex64::from_polar(1.0, theta));
    }
    acc / CONTOUR_POINTS as f64
}

impl Stepper {
    /// `symbol[i]` is `L` at FFT index `i`; it must satisfy
    /// `L(-ξ) = conj(L(ξ))`.
    pub(crate) fn new(integrator: Integrator, symbol: &[Complex64], h: f64) -> Self {
        let n = symbol.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut s = Stepper {
            integrator,
            h,
            e: vec![zero; n],
            e2: vec![zero; n],
            q: vec![zero; n],
            f1: vec![zero; n],
            f2: vec![zero; n],
            f3: vec![zero; n],
        };
        for i in 0..=n / 2 {
            let z = symbol[i] * h;
            let e = z.exp();
            let e2 = (z * 0.5).exp();
            let (q, f1, f2, f3) = match integrator {
                Integrator::Etdrk4 => (
                    contour_mean(z, |w| ((w * 0.5).exp() - 1.0) / w) * h,
                    contour_mean(z, |w| {
                        (-4.0 - w + w.exp() * (4.0 - 3.0 * w + w * w)) / (w * w * w)
                    }) * h,
                    contour_mean(z, |w| (2.0 + w + w.exp() * (w - 2.0)) / (w * w * w)) * h,
                    contour_mean(z, |w| {
                        (-4.0 - 3.0 * w - w * w + w.exp() * (4.0 - w)) / (w * w * w)
                    }) * h,
                ),
                Integrator::IntegratingFactorRk4 => (zero, zero, zero, zero),
            };
            let vals = [e, e2, q, f1, f2, f3];
            let slots = [&mut s.e, &mut s.e2, &mut s.q, &mut s.f1, &mut s.f2, &mut s.f3];
            for (slot, v) in slots.into_iter().zip(vals) {
                slot[i] = v;
                if i != 0 && i != n / 2 {
                    slot[n - i] = v.conj();
                }
            }
        }
        s
    }

    /// Advances `v` by one step; `nonlin` evaluates `N̂`.
    pub(crate) fn advance<N>(&self, v: &SpectralField, nonlin: &N) -> Result<SpectralField>
    where
        N: Fn(&SpectralField) -> Result<SpectralField>,
    {
        match self.integrator {
            Integrator::Etdrk4 => self.etdrk4(v, nonlin),
            Integrator::IntegratingFactorRk4 => self.if_rk4(v, nonlin),
        }
    }

    fn combine<F>(&self, like: &SpectralField, f: F) -> SpectralField
    where
        F: Fn(usize) -> Complex64,
    {
        let mut out = SpectralField::zeros(like.grid());
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c = f(i);
        }
        out.coeffs_mut()[like.grid().nyquist_index()] = Complex64::new(0.0, 0.0);
        out
    }

    fn etdrk4<N>(&self, v: &SpectralField, nonlin: &N) -> Result<SpectralField>
    where
        N: Fn(&SpectralField) -> Result<SpectralField>,
    {
        let vc = v.coeffs();
        let nv = nonlin(v)?;
        let nvc = nv.coeffs();
        let a = self.combine(v, |i| self.e2[i] * vc[i] + self.q[i] * nvc[i]);
        let na = nonlin(&a)?;
        let nac = na.coeffs();
        let b = self.combine(v, |i| self.e2[i] * vc[i] + self.q[i] * nac[i]);
        let nb = nonlin(&b)?;
        let nbc = nb.coeffs();
        let ac = a.coeffs();
        let c = self.combine(v, |i| {
            self.e2[i] * ac[i] + self.q[i] * (2.0 * nbc[i] - nvc[i])
        });
        let nc = nonlin(&c)?;
        let ncc = nc.coeffs();
        let mut out = self.combine(v, |i| {
            self.e[i] * vc[i]
                + self.f1[i] * nvc[i]
                + 2.0 * self.f2[i] * (nac[i] + nbc[i])
                + self.f3[i] * ncc[i]
        });
        out.symmetrize();
        Ok(out)
    }

    fn if_rk4<N>(&self, v: &SpectralField, nonlin: &N) -> Result<SpectralField>
    where
        N: Fn(&SpectralField) -> Result<SpectralField>,
    {
        let h = self.h;
        let vc = v.coeffs();
        let k1 = nonlin(v)?;
        let k1c = k1.coeffs();
        let s2 = self.combine(v, |i| self.e2[i] * (vc[i] + 0.5 * h * k1c[i]));
        let k2 = nonlin(&s2)?;
        let k2c = k2.coeffs();
        let s3 = self.combine(v, |i| self.e2[i] * vc[i] + 0.5 * h * k2c[i]);
        let k3 = nonlin(&s3)?;
        let k3c = k3.coeffs();
        let s4 = self.combine(v, |i| self.e[i] * vc[i] + h * self.e2[i] * k3c[i]);
        let k4 = nonlin(&s4)?;
        let k4c = k4.coeffs();
        let mut out = self.combine(v, |i| {
            self.e[i] * vc[i]
                + h / 6.0
                    * (self.e[i] * k1c[i] + 2.0 * self.e2[i] * (k2c[i] + k3c[i]) + k4c[i])
        });
        out.symmetrize();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_matches_taylor_near_zero() {
        // φ-type coefficient Q/h = (e^{z/2} - 1)/z → 1/2 as z → 0
        let q = contour_mean(Complex64::new(0.0, 0.0), |w| ((w * 0.5).exp() - 1.0) / w);
        assert!((q - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        // f1/h → 1/6, f2/h → 1/6, f3/h → 1/6
        let f1 = contour_mean(Complex64::new(0.0, 0.0), |w| {
            (-4.0 - w + w.exp() * (4.0 - 3.0 * w + w * w)) / (w * w * w)
        });
        assert!((f1 - Complex64::new(1.0 / 6.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn contour_matches_direct_for_large_z() {
        let z = Complex64::new(0.0, 37.5);
        let direct = ((z * 0.5).exp() - 1.0) / z;
        let q = contour_mean(z, |w| ((w * 0.5).exp() - 1.0) / w);
        assert!((q - direct).norm() < 1e-13);
    }
}
