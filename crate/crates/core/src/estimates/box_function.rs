//! Nonnegative functions on a discrete `(τ, ξ)` lattice supported in a
//! modulation-frequency box
//! `D_{l,k} = {(τ, ξ) : τ - ω(ξ) ∈ supp η_l, ξ ∈ supp χ_k}`.
//!
//! `τ` lives on `Δτ·ℤ` and is addressed by its integer index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionSpec;
use crate::error::{Error, Result};
use crate::littlewood_paley::{chi_k, eta_l, eta_l_support};

/// Lattice shared by a family of box functions.
#[derive(Debug, Clone)]
pub struct BoxGrid {
    pub dispersion: DispersionSpec,
    pub dtau: f64,
    pub l_cap: u32,
    pub k_cap: u32,
}

impl BoxGrid {
    /// `Δτ = 1/4`, `l <= 12`, `k <= 10`.
    pub fn new(dispersion: DispersionSpec) -> Self {
        Self {
            dispersion,
            dtau: 0.25,
            l_cap: 12,
            k_cap: 10,
        }
    }

    pub fn with_dtau(mut self, dtau: f64) -> Self {
        self.dtau = dtau;
        self
    }

    pub fn with_caps(mut self, l_cap: u32, k_cap: u32) -> Self {
        self.l_cap = l_cap;
        self.k_cap = k_cap;
        self
    }

    pub(crate) fn compatible(&self, other: &BoxGrid) -> bool {
        self.dtau == other.dtau
            && self.dispersion.label() == other.dispersion.label()
            && self.dispersion.alpha() == other.dispersion.alpha()
    }

    /// Index of the lattice point nearest to `ω(ξ)`.
    pub fn anchor(&self, xi: i64) -> i64 {
        (self.dispersion.omega(xi as f64) / self.dtau).round() as i64
    }

    /// Whether `(τ index, ξ)` lies in `D_{l,k}`.
    pub fn in_box(&self, l: u32, k: u32, tau_idx: i64, xi: i64) -> bool {
        let sigma = tau_idx as f64 * self.dtau - self.dispersion.omega(xi as f64);
        chi_k(k, xi as f64) > 0.0 && eta_l(l, sigma) > 0.0
    }

    fn check_caps(&self, l: u32, k: u32) -> Result<()> {
        if l > self.l_cap || k > self.k_cap {
            return Err(Error::resource(format!(
                "box (l={l}, k={k}) exceeds the grid capacity (l <= {}, k <= {})",
                self.l_cap, self.k_cap
            )));
        }
        Ok(())
    }

    /// Offsets `j` such that `η_l` is positive on `[jΔτ - Δτ/2, jΔτ + Δτ/2]`,
    /// so that `anchor(ξ) + j` lies in the box for every `ξ`.
    fn safe_offsets(&self, l: u32) -> Vec<i64> {
        let (lo, hi) = eta_l_support(l);
        let h = self.dtau;
        let jmax = (hi / h).ceil() as i64;
        (-jmax..=jmax)
            .filter(|&j| {
                let c = j as f64 * h;
                let (a, b) = (c - h / 2.0, c + h / 2.0);
                let inside = |s: f64| eta_l(l, s) > 0.0;
                // the support is an interval (l = 0) or a symmetric pair of
                // intervals, so positivity at both ends and on the same side
                // of the hole is enough
                inside(a) && inside(b) && (l == 0 || a.abs() > lo && b.abs() > lo && a * b > 0.0)
            })
            .collect()
    }

    fn frequencies(&self, k: u32) -> Vec<i64> {
        let hi = (1.6 * (k as f64).exp2()).ceil() as i64 + 1;
        (-hi..=hi).filter(|&x| chi_k(k, x as f64) > 0.0).collect()
    }
}

/// One `ξ`-slice: values at consecutive `τ` indices starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub xi: i64,
    pub start: i64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Storage {
    /// `f(anchor_m + offset + j, ξ_m) = weights[m] * profile[j]`.
    Separable {
        xis: Vec<i64>,
        anchors: Vec<i64>,
        weights: Vec<f64>,
        profile: Vec<f64>,
        offset: i64,
    },
    Explicit(Vec<Row>),
}

#[derive(Debug, Clone)]
pub struct BoxFunction {
    l: u32,
    k: u32,
    grid: BoxGrid,
    pub(crate) storage: Storage,
    l2_norm: f64,
}

fn norm_of(storage: &Storage, dtau: f64) -> f64 {
    let sq = match storage {
        Storage::Separable {
            weights, profile, ..
        } => {
            let w: f64 = weights.iter().map(|a| a * a).sum();
            let p: f64 = profile.iter().map(|b| b * b).sum();
            w * p
        }
        Storage::Explicit(rows) => rows
            .iter()
            .flat_map(|r| r.values.iter())
            .map(|v| v * v)
            .sum(),
    };
    (dtau * sq).sqrt()
}

impl BoxFunction {
    /// Random function with i.i.d. uniform weights over every frequency of
    /// `supp χ_k` and a shared uniform modulation profile, normalized to unit
    /// `L²_τ ℓ²_ξ` norm.
    pub fn sample(grid: &BoxGrid, l: u32, k: u32, seed: u64) -> Result<Self> {
        grid.check_caps(l, k)?;
        let offsets = grid.safe_offsets(l);
        let xis = grid.frequencies(k);
        if offsets.is_empty() || xis.is_empty() {
            return Err(Error::resource(format!(
                "box (l={l}, k={k}) contains no lattice point at Δτ = {}",
                grid.dtau
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first = offsets[0];
        let last = *offsets.last().expect("nonempty");
        let mut profile = vec![0.0; (last - first + 1) as usize];
        for &j in &offsets {
            profile[(j - first) as usize] = 1.0 - rng.random::<f64>();
        }
        let weights: Vec<f64> = xis.iter().map(|_| 1.0 - rng.random::<f64>()).collect();
        let anchors = xis.iter().map(|&x| grid.anchor(x)).collect();
        let storage = Storage::Separable {
            xis,
            anchors,
            weights,
            profile,
            offset: first,
        };
        let mut f = Self {
            l,
            k,
            grid: grid.clone(),
            l2_norm: norm_of(&storage, grid.dtau),
            storage,
        };
        let n = f.l2_norm;
        f.scale_in_place(1.0 / n);
        Ok(f)
    }

    /// Function with the given `(τ index, ξ, value)` point values.
    pub fn from_points(grid: &BoxGrid, l: u32, k: u32, points: &[(i64, i64, f64)]) -> Result<Self> {
        grid.check_caps(l, k)?;
        let mut rows: Vec<Row> = Vec::new();
        for &(t, xi, v) in points {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("value {v} at ({t}, {xi}) is not nonnegative")));
            }
            if v > 0.0 && !grid.in_box(l, k, t, xi) {
                return Err(Error::domain(format!(
                    "point (τ index {t}, ξ {xi}) lies outside D_{{{l},{k}}}"
                )));
            }
            match rows.iter_mut().find(|r| r.xi == xi) {
                Some(r) => {
                    let end = r.start + r.values.len() as i64;
                    if t < r.start {
                        let mut v2 = vec![0.0; (r.start - t) as usize];
                        v2.append(&mut r.values);
                        r.values = v2;
                        r.start = t;
                    } else if t >= end {
                        r.values.resize((t - r.start + 1) as usize, 0.0);
                    }
                    r.values[(t - r.start) as usize] += v;
                }
                None => rows.push(Row {
                    xi,
                    start: t,
                    values: vec![v],
                }),
            }
        }
        rows.sort_by_key(|r| r.xi);
        let storage = Storage::Explicit(rows);
        Ok(Self {
            l,
            k,
            grid: grid.clone(),
            l2_norm: norm_of(&storage, grid.dtau),
            storage,
        })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    /// `‖f‖_{L²_τ ℓ²_ξ}` with `Δτ`-weighted `τ` sums.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    /// Number of frequencies carrying a slice.
    pub fn frequency_count(&self) -> usize {
        match &self.storage {
            Storage::Separable { xis, .. } => xis.len(),
            Storage::Explicit(rows) => rows.len(),
        }
    }

    /// All slices in increasing `ξ`.
    pub fn rows(&self) -> Vec<Row> {
        match &self.storage {
            Storage::Separable {
                xis,
                anchors,
                weights,
                profile,
                offset,
            } => xis
                .iter()
                .zip(anchors)
                .zip(weights)
                .map(|((&xi, &a), &w)| Row {
                    xi,
                    start: a + offset,
                    values: profile.iter().map(|b| w * b).collect(),
                })
                .collect(),
            Storage::Explicit(rows) => rows.clone(),
        }
    }

    /// Same function with slice-wise storage.
    pub fn to_explicit(&self) -> Self {
        Self {
            storage: Storage::Explicit(self.rows()),
            ..self.clone()
        }
    }

    pub fn value(&self, tau_idx: i64, xi: i64) -> f64 {
        self.rows()
            .iter()
            .find(|r| r.xi == xi)
            .and_then(|r| {
                let i = tau_idx - r.start;
                (i >= 0).then(|| r.values.get(i as usize).copied()).flatten()
            })
            .unwrap_or(0.0)
    }

    /// Checks nonnegativity and `supp f ⊂ D_{l,k}` point by point.
    pub fn support_ok(&self) -> bool {
        self.rows().iter().all(|r| {
            r.values.iter().enumerate().all(|(i, &v)| {
                v >= 0.0 && (v == 0.0 || self.grid.in_box(self.l, self.k, r.start + i as i64, r.xi))
            })
        })
    }

    fn scale_in_place(&mut self, lambda: f64) {
        match &mut self.storage {
            Storage::Separable { weights, .. } => weights.iter_mut().for_each(|w| *w *= lambda),
            Storage::Explicit(rows) => rows
                .iter_mut()
                .flat_map(|r| r.values.iter_mut())
                .for_each(|v| *v *= lambda),
        }
        self.l2_norm *= lambda;
    }

    /// `λ f` for `λ >= 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::domain("scaling factor must be nonnegative"));
        }
        let mut f = self.clone();
        f.scale_in_place(lambda);
        Ok(f)
    }

    /// `f(τ - shift·Δτ, ξ)`, without a support check (the shifted function
    /// generally lives in a different box).
    pub fn shifted_tau(&self, shift: i64) -> Self {
        let storage = match &self.storage {
            Storage::Separable {
                xis,
                anchors,
                weights,
                profile,
                offset,
            } => Storage::Separable {
                xis: xis.clone(),
                anchors: anchors.iter().map(|a| a + shift).collect(),
                weights: weights.clone(),
                profile: profile.clone(),
                offset: *offset,
            },
            Storage::Explicit(rows) => Storage::Explicit(
                rows.iter()
                    .map(|r| Row {
                        start: r.start + shift,
                        ..r.clone()
                    })
                    .collect(),
            ),
        };
        Self {
            storage,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> BoxGrid {
        BoxGrid::new(DispersionSpec::fractional(0.5).unwrap())
    }

    #[test]
    fn sample_is_normalized_and_supported() {
        let g = grid();
        for (l, k) in [(0, 0), (1, 2), (3, 3), (5, 1)] {
            let f = BoxFunction::sample(&g, l, k, 7).unwrap();
            assert!((f.l2_norm() - 1.0).abs() < 1e-12);
            let direct = (g.dtau
                * f.rows().iter().flat_map(|r| r.values.clone()).map(|v| v * v).sum::<f64>())
            .sqrt();
            assert!((direct - 1.0).abs() < 1e-12);
            assert!(f.support_ok(), "l={l} k={k}");
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let g = grid();
        let a = BoxFunction::sample(&g, 4, 3, 11).unwrap();
        let b = BoxFunction::sample(&g, 4, 3, 11).unwrap();
        assert_eq!(a.rows(), b.rows());
        let c = BoxFunction::sample(&g, 4, 3, 12).unwrap();
        assert_ne!(a.rows(), c.rows());
    }

    #[test]
    fn capacity_and_empty_boxes() {
        let g = grid();
        assert!(matches!(BoxFunction::sample(&g, 13, 0, 1), Err(Error::Resource(_))));
        assert!(matches!(BoxFunction::sample(&g, 0, 11, 1), Err(Error::Resource(_))));
        let coarse = grid().with_dtau(4.0);
        assert!(matches!(BoxFunction::sample(&coarse, 0, 2, 1), Err(Error::Resource(_))));
    }

    #[test]
    fn points_outside_box_rejected() {
        let g = grid();
        let a = g.anchor(3);
        assert!(BoxFunction::from_points(&g, 0, 1, &[(a, 3, 1.0)]).is_ok());
        assert!(matches!(
            BoxFunction::from_points(&g, 0, 1, &[(a + 100, 3, 1.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            BoxFunction::from_points(&g, 0, 1, &[(a, 3, -1.0)]),
            Err(Error::Domain(_))
        ));
    }
}
