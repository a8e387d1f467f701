//! Dyadic cutoffs, Littlewood–Paley projectors and the block Sobolev norm.
//!
//! All cutoffs derive from one even bump `χ` with
//! `1_{[-5/4,5/4]} <= χ <= 1_{[-8/5,8/5]}`:
//!
//! * `χ_k(ξ) = χ(2^{-k}ξ) - χ(2^{1-k}ξ)` for `k >= 0`,
//! * `χ_{<=k}(ξ) = χ(2^{-k}ξ) - χ(2ξ)`,
//! * `χ_{>k}(ξ) = 1 - χ(2^{-k}ξ)`.
//!
//! Note `χ_0(ξ) = χ(ξ) - χ(2ξ)` vanishes at `ξ = 0`, so the zero mode is never
//! part of any block.

use crate::spectral::SpectralField;

const INNER: f64 = 5.0 / 4.0;
const OUTER: f64 = 8.0 / 5.0;

/// Identifier embedded in exported files so bump-dependent numbers can be
/// reproduced.
pub const BUMP_ID: &str = "exp-ratio:psi(t)=f(t)/(f(t)+f(1-t)),f(t)=exp(-1/t);band=[5/4,8/5]";

/// Smooth transition `ψ: [0,1] → [0,1]` and the even bump built from it.
#[derive(Debug, Clone, Copy, Default)]
pub struct BumpProfile;

impl BumpProfile {
    pub fn id(&self) -> &'static str {
        BUMP_ID
    }

    /// `ψ(t) = f(t) / (f(t) + f(1 - t))` with `f(t) = exp(-1/t)` for `t > 0`.
    pub fn transition(&self, t: f64) -> f64 {
        transition(t)
    }

    /// The bump `χ`.
    pub fn chi(&self, xi: f64) -> f64 {
        chi(xi)
    }
}

fn smooth_step_factor(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

pub fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = smooth_step_factor(t);
    let b = smooth_step_factor(1.0 - t);
    a / (a + b)
}

/// The even bump: 1 on `|ξ| <= 5/4`, 0 on `|ξ| >= 8/5`.
pub fn chi(xi: f64) -> f64 {
    let r = xi.abs();
    if r <= INNER {
        1.0
    } else if r >= OUTER {
        0.0
    } else {
        transition((OUTER - r) / (OUTER - INNER))
    }
}

fn dilate(k: i32, xi: f64) -> f64 {
    chi(xi * (-(k as f64)).exp2())
}

/// `χ_k(ξ) = χ(2^{-k}ξ) - χ(2^{1-k}ξ)`.
pub fn chi_k(k: u32, xi: f64) -> f64 {
    let k = k as i32;
    dilate(k, xi) - dilate(k - 1, xi)
}

/// `χ_{<=k}(ξ) = Σ_{j<=k} χ_j(ξ) = χ(2^{-k}ξ) - χ(2ξ)`.
pub fn chi_le(k: u32, xi: f64) -> f64 {
    dilate(k as i32, xi) - dilate(-1, xi)
}

/// `χ_{>k}(ξ) = Σ_{j>k} χ_j(ξ) = 1 - χ(2^{-k}ξ)`.
pub fn chi_gt(k: u32, xi: f64) -> f64 {
    1.0 - dilate(k as i32, xi)
}

/// Modulation cutoff `η_0 = χ` and `η_l(τ) = η_0(2^{-l}τ) - η_0(2^{1-l}τ)`
/// for `l >= 1`.
pub fn eta_l(l: u32, tau: f64) -> f64 {
    if l == 0 {
        chi(tau)
    } else {
        let l = l as i32;
        dilate(l, tau) - dilate(l - 1, tau)
    }
}

/// `η_{<=l}(τ) = η_0(2^{-l}τ)`.
pub fn eta_le(l: u32, tau: f64) -> f64 {
    dilate(l as i32, tau)
}

/// Closed interval of `|ξ|` outside which `χ_k` vanishes.
pub fn chi_k_support(k: u32) -> (f64, f64) {
    if k == 0 {
        (0.0, OUTER)
    } else {
        let s = (k as f64).exp2();
        (s * INNER / 2.0, s * OUTER)
    }
}

/// Closed interval of `|τ|` outside which `η_l` vanishes.
pub fn eta_l_support(l: u32) -> (f64, f64) {
    chi_k_support(l)
}

/// Integer frequencies `ξ > 0` with `χ_k(ξ) > 0`.
pub fn chi_k_positive_support(k: u32) -> std::ops::RangeInclusive<i64> {
    let (lo, hi) = chi_k_support(k);
    let mut a = lo.floor() as i64;
    while a < 1 || chi_k(k, a as f64) <= 0.0 {
        a += 1;
    }
    let mut b = hi.ceil() as i64;
    while b > a && chi_k(k, b as f64) <= 0.0 {
        b -= 1;
    }
    a..=b
}

/// Smallest `K` with `χ_{<=K} = 1` on every nonzero resolvable frequency
/// of a grid whose largest frequency is `max_xi`.
pub fn covering_scale(max_xi: i64) -> u32 {
    let mut k = 0;
    while ((k as f64).exp2() * INNER) < max_xi as f64 {
        k += 1;
    }
    k
}

/// `P_k u`.
pub fn lp_project(field: &SpectralField, k: u32) -> SpectralField {
    project_with(field, |xi| chi_k(k, xi))
}

/// `P_{<=k} u`.
pub fn lp_project_le(field: &SpectralField, k: u32) -> SpectralField {
    project_with(field, |xi| chi_le(k, xi))
}

/// `P_{>k} u`.
pub fn lp_project_gt(field: &SpectralField, k: u32) -> SpectralField {
    project_with(field, |xi| chi_gt(k, xi))
}

fn project_with<F: Fn(f64) -> f64>(field: &SpectralField, weight: F) -> SpectralField {
    let mut out = field.clone();
    let grid = field.grid();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= weight(grid.frequency(i) as f64);
    }
    out
}

/// Squared block norm `û(0)² + Σ_k 2^{2ks} ‖P_k u‖²_{L²}`.
pub fn sobolev_norm_sq(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    let kmax = covering_scale(grid.max_frequency()) + 1;
    let mut blocks = vec![0.0; kmax as usize + 1];
    for (i, c) in field.coeffs().iter().enumerate() {
        let xi = grid.frequency(i);
        if xi == 0 || i == grid.nyquist_index() {
            continue;
        }
        let a = c.norm_sqr();
        if a == 0.0 {
            continue;
        }
        // at most two blocks overlap any frequency
        let base = (xi.unsigned_abs() as f64).log2().floor().max(0.0) as u32;
        for k in base.saturating_sub(1)..=(base + 1).min(kmax) {
            let w = chi_k(k, xi as f64);
            if w != 0.0 {
                blocks[k as usize] += w * w * a;
            }
        }
    }
    let mut total = field.mean_mode().powi(2);
    for (k, b) in blocks.iter().enumerate() {
        total += (2.0 * k as f64 * s).exp2() * b / crate::spectral::TorusGrid::LENGTH;
    }
    total
}

/// Block Sobolev norm; negative `s` uses the same formula.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(field, s).sqrt()
}
