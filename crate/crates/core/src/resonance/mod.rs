//! Resonance function, inverse-resonance differences and the symbol
//! families used in the energy estimates, with a brute-force verifier for
//! their dyadic bounds.

mod scan;
mod symbols;

use serde::{Deserialize, Serialize};

use crate::dispersion::{resonance_window_from_table, DispersionSpec, RatioWindow};
use crate::error::{Error, Result};

pub use scan::{
    enumerate_scales, symbol_eval, worst_constant, worst_constant_for, BoundCase, CaseKind,
    ConstantReport, ScaleStat, Scales, ScanOptions, Witness,
};
pub use symbols::{FourScales, a_family, a_prime_family, m_family, m_symbol, nu, sigma, sigma_j};

/// Three nonzero integer frequencies summing to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencyTriple {
    xi: [i64; 3],
}

impl FrequencyTriple {
    pub fn new(xi1: i64, xi2: i64, xi3: i64) -> Result<Self> {
        if xi1 + xi2 + xi3 != 0 {
            return Err(Error::domain(format!(
                "frequencies ({xi1}, {xi2}, {xi3}) do not sum to zero"
            )));
        }
        if xi1 == 0 || xi2 == 0 || xi3 == 0 {
            return Err(Error::domain(format!(
                "frequencies ({xi1}, {xi2}, {xi3}) contain a zero entry"
            )));
        }
        Ok(Self {
            xi: [xi1, xi2, xi3],
        })
    }

    pub fn values(&self) -> [i64; 3] {
        self.xi
    }

    /// Magnitudes in decreasing order `|ξ1*| >= |ξ2*| >= |ξ3*|`.
    pub fn ordered_magnitudes(&self) -> [i64; 3] {
        let mut m = self.xi.map(i64::abs);
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }
}

/// `ω(ξ) = -ξ|ξ|^α`.
pub(crate) fn omega_frac(alpha: f64, xi: f64) -> f64 {
    -xi * xi.abs().powf(alpha)
}

/// `Ω` for the fractional family without validation.
pub(crate) fn resonance_frac(alpha: f64, a: i64, b: i64, c: i64) -> f64 {
    omega_frac(alpha, a as f64) + omega_frac(alpha, b as f64) + omega_frac(alpha, c as f64)
}

/// `Ω(ξ1, ξ2, ξ3) = ω(ξ1) + ω(ξ2) + ω(ξ3)`.
pub fn resonance(spec: &DispersionSpec, t: &FrequencyTriple) -> f64 {
    t.values().iter().map(|&x| spec.omega(x as f64)).sum()
}

/// `|1/Ω(ξa, ξ2+ξb, ξ3) - 1/Ω(ξa+ξb, ξ2, ξ3)|` for the fractional family.
pub fn inv_resonance_gap(alpha: f64, xa: i64, xb: i64, x2: i64, x3: i64) -> Result<f64> {
    if xa + xb + x2 + x3 != 0 {
        return Err(Error::domain("ξa + ξb + ξ2 + ξ3 must vanish"));
    }
    let q = FrequencyTriple::new(xa, x2 + xb, x3)?;
    let p = FrequencyTriple::new(xa + xb, x2, x3)?;
    let [a, b, c] = q.values();
    let oq = resonance_frac(alpha, a, b, c);
    let [a, b, c] = p.values();
    let op = resonance_frac(alpha, a, b, c);
    if oq == 0.0 || op == 0.0 {
        return Err(Error::domain("resonance vanishes on an embedded triple"));
    }
    Ok((1.0 / oq - 1.0 / op).abs())
}

/// Window of `|Ω| / (|ξ1*|^α |ξ3*|)` over all nonzero zero-sum triples with
/// `|ξi| <= bound` and `|ξ1*| > κ`, by exhaustive enumeration.
pub fn resonance_window(spec: &DispersionSpec, bound: i64) -> Result<(RatioWindow, u64)> {
    let table = spec.table(bound)?;
    Ok(resonance_window_from_table(
        &table,
        bound,
        spec.alpha(),
        spec.kappa(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_examples() {
        let bo1 = DispersionSpec::fractional(1.0).unwrap();
        let t = FrequencyTriple::new(1, 1, -2).unwrap();
        assert_eq!(resonance(&bo1, &t), 2.0);
        let t = FrequencyTriple::new(3, -1, -2).unwrap();
        assert_eq!(resonance(&bo1, &t), -4.0);
        let bo = DispersionSpec::fractional(0.5).unwrap();
        let t = FrequencyTriple::new(4, -1, -3).unwrap();
        let want = -8.0 + 1.0 + 3.0 * 3f64.sqrt();
        assert!((resonance(&bo, &t) - want).abs() < 1e-12);
        assert!((want + 1.8038).abs() < 1e-4);
    }

    #[test]
    fn triple_validation() {
        assert!(matches!(FrequencyTriple::new(1, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(FrequencyTriple::new(0, 1, -1), Err(Error::Domain(_))));
        let t = FrequencyTriple::new(5, -7, 2).unwrap();
        assert_eq!(t.ordered_magnitudes(), [7, 5, 2]);
    }

    #[test]
    fn gap_examples() {
        assert_eq!(inv_resonance_gap(0.5, 40, 0, -45, 5).unwrap(), 0.0);
        // direct arithmetic with ω(ξ) = -ξ|ξ| at α = 1
        let w = |x: f64| -x * x.abs();
        let oq = w(40.0) + w(-43.0) + w(3.0);
        let op = w(42.0) + w(-45.0) + w(3.0);
        let want = (1.0 / oq - 1.0 / op).abs();
        let got = inv_resonance_gap(1.0, 40, 2, -45, 3).unwrap();
        assert!((got - want).abs() <= 1e-15 * want.max(1e-300) + 1e-18);
        assert!(matches!(
            inv_resonance_gap(0.5, 3, -3, 5, -5),
            Err(Error::Domain(_))
        ));
    }
}
