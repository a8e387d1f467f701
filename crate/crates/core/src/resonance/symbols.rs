//! Symbol families for the fractional dispersion `ω(ξ) = -ξ|ξ|^α`.
//!
//! Frequencies are integers; `ξab` means `ξa + ξb` and so on. Whenever a
//! cutoff product vanishes the symbol is returned as zero without touching
//! the resonance denominators.

use num_complex::Complex64;

use super::resonance_frac;
use crate::error::{Error, Result};
use crate::littlewood_paley::chi_k;

fn c(k: u32, xi: i64) -> f64 {
    chi_k(k, xi as f64)
}

fn c2(k: u32, xi: i64) -> f64 {
    let v = c(k, xi);
    v * v
}

fn inv_omega(alpha: f64, a: i64, b: i64, cc: i64) -> Result<f64> {
    let o = resonance_frac(alpha, a, b, cc);
    if a == 0 || b == 0 || cc == 0 || o == 0.0 {
        return Err(Error::domain(format!(
            "resonance undefined at ({a}, {b}, {cc})"
        )));
    }
    Ok(1.0 / o)
}

fn im(v: f64) -> Complex64 {
    Complex64::new(0.0, v)
}

/// `σ(ξ1, ξ2, ξ3) = iξ1 χ²_{k1}(ξ1) χ_{k2}(ξ2) χ_{k3}(ξ3)`.
pub fn sigma(k: [u32; 3], xi: [i64; 3]) -> Complex64 {
    let [k1, k2, k3] = k;
    let [x1, x2, x3] = xi;
    im(x1 as f64 * c2(k1, x1) * c(k2, x2) * c(k3, x3))
}

/// Pieces of `σ(ξ1,ξ2,ξ3) + σ(ξ2,ξ1,ξ3) = σ1 + σ2 + σ3`:
///
/// * `σ1 = -iξ3 χ²_{k1}(ξ1) χ_{k2}(ξ2) χ_{k3}(ξ3)`
/// * `σ2 = -iξ2 [χ²_{k1}(ξ1) - χ²_{k1}(ξ2)] χ_{k2}(ξ2) χ_{k3}(ξ3)`
/// * `σ3 = -iξ2 χ²_{k1}(ξ2) [χ_{k2}(ξ2) - χ_{k2}(ξ1)] χ_{k3}(ξ3)`
pub fn sigma_j(j: u8, k: [u32; 3], xi: [i64; 3]) -> Result<Complex64> {
    let [k1, k2, k3] = k;
    let [x1, x2, x3] = xi;
    let low = c(k3, x3);
    let v = match j {
        1 => -(x3 as f64) * c2(k1, x1) * c(k2, x2) * low,
        2 => -(x2 as f64) * (c2(k1, x1) - c2(k1, x2)) * c(k2, x2) * low,
        3 => -(x2 as f64) * c2(k1, x2) * (c(k2, x2) - c(k2, x1)) * low,
        _ => return Err(Error::domain(format!("sigma index {j} not in 1..=3"))),
    };
    Ok(im(v))
}

/// `ν(ξ1, ξ2, ξ3) = ξ2 χ_{k1}(ξ1) [χ_{k1}(ξ2 + ξ3) - χ_{k1}(ξ2)] χ_{k3}(ξ3)`.
pub fn nu(k1: u32, k3: u32, xi: [i64; 3]) -> f64 {
    let [x1, x2, x3] = xi;
    x2 as f64 * c(k1, x1) * (c(k1, x2 + x3) - c(k1, x2)) * c(k3, x3)
}

/// Dyadic labels of the four-frequency symbols, `(k1, ka, kb, k2, k3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourScales {
    pub k1: u32,
    pub ka: u32,
    pub kb: u32,
    pub k2: u32,
    pub k3: u32,
}

/// `m(ξa, ξb, ξ2, ξ3) = (-iξab) χ²_{k1}(ξab) χ_{ka}(ξa) χ_{k2}(ξ2) / Ω(ξab, ξ2, ξ3)
///                      · (-iξ3) χ_{k3}(ξ3) χ_{kb}(ξb)`.
pub fn m_symbol(alpha: f64, s: FourScales, xi: [i64; 4]) -> Result<Complex64> {
    let [xa, xb, x2, x3] = xi;
    let xab = xa + xb;
    let cut = c2(s.k1, xab) * c(s.ka, xa) * c(s.k2, x2) * c(s.k3, x3) * c(s.kb, xb);
    if cut == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // (-iξab)(-iξ3) = -ξab ξ3
    Ok(Complex64::new(
        -(xab as f64) * x3 as f64 * cut * inv_omega(alpha, xab, x2, x3)?,
        0.0,
    ))
}

/// The six-term split `m = m1 + ... + m6` with `m6 = -m(ξ2, ξb, ξa, ξ3)`.
pub fn m_family(j: u8, alpha: f64, s: FourScales, xi: [i64; 4]) -> Result<Complex64> {
    let [xa, xb, x2, x3] = xi;
    let xab = xa + xb;
    let x2b = x2 + xb;
    // common tail (-iξ3) χ_{k3}(ξ3) χ_{kb}(ξb)
    let tail = c(s.k3, x3) * c(s.kb, xb);
    if tail == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let tail = im(-(x3 as f64) * tail);
    let head = match j {
        1 => {
            let cut = c2(s.k1, xab) * c(s.ka, xa) * c(s.k2, x2);
            if cut == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            im((x3 - xb) as f64 * cut * inv_omega(alpha, xab, x2, x3)?)
        }
        2 => {
            let cut = (c2(s.k1, xab) - c2(s.k1, x2b)) * c(s.ka, xa) * c(s.k2, x2);
            if cut == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            im(x2b as f64 * cut * inv_omega(alpha, xab, x2, x3)?)
        }
        3 => {
            let cut = c2(s.k1, x2b) * (c(s.ka, xa) - c(s.ka, x2)) * c(s.k2, x2);
            if cut == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            im(x2b as f64 * cut * inv_omega(alpha, xab, x2, x3)?)
        }
        4 => {
            let cut = c2(s.k1, x2b) * c(s.ka, x2) * (c(s.k2, x2) - c(s.k2, xa));
            if cut == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            im(x2b as f64 * cut * inv_omega(alpha, xab, x2, x3)?)
        }
        5 => {
            let cut = c2(s.k1, x2b) * c(s.ka, x2) * c(s.k2, xa);
            if cut == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let gap = inv_omega(alpha, xab, x2, x3)? - inv_omega(alpha, x2b, xa, x3)?;
            im(x2b as f64 * cut * gap)
        }
        6 => {
            let cut = c2(s.k1, x2b) * c(s.ka, x2) * c(s.k2, xa);
            if cut == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            im(x2b as f64 * cut * inv_omega(alpha, x2b, xa, x3)?)
        }
        _ => return Err(Error::domain(format!("m index {j} not in 1..=6"))),
    };
    Ok(head * tail)
}

fn nu_over_omega(alpha: f64, k1: u32, k3: u32, t: [i64; 3]) -> Result<f64> {
    let n = nu(k1, k3, t);
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(n * inv_omega(alpha, t[0], t[1], t[2])?)
}

/// `A1 = (ξab + ξ2b) ν/Ω(P)`, `A2 = [ν(Q) - ν(P)] ξ2b / Ω(P)`,
/// `A3 = [1/Ω(Q) - 1/Ω(P)] ξ2b ν(Q)` with `P = (ξab, ξ2, ξ3)`,
/// `Q = (ξa, ξ2b, ξ3)`. Their sum is `ξab ν/Ω(P) + ξ2b ν/Ω(Q)`.
pub fn a_family(i: u8, alpha: f64, k1: u32, k3: u32, xi: [i64; 4]) -> Result<f64> {
    let [xa, xb, x2, x3] = xi;
    let p = [xa + xb, x2, x3];
    let q = [xa, x2 + xb, x3];
    let x2b = (x2 + xb) as f64;
    match i {
        1 => Ok(((xa + xb) as f64 + x2b) * nu_over_omega(alpha, k1, k3, p)?),
        2 => {
            let d = nu(k1, k3, q) - nu(k1, k3, p);
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok(d * x2b * inv_omega(alpha, p[0], p[1], p[2])?)
        }
        3 => {
            let n = nu(k1, k3, q);
            if n == 0.0 {
                return Ok(0.0);
            }
            let gap = inv_omega(alpha, q[0], q[1], q[2])? - inv_omega(alpha, p[0], p[1], p[2])?;
            Ok(gap * x2b * n)
        }
        _ => Err(Error::domain(format!("A index {i} not in 1..=3"))),
    }
}

/// Mirror family with `Q' = (ξb, ξ2a, ξ3)` and prefactor `ξa2`.
pub fn a_prime_family(i: u8, alpha: f64, k1: u32, k3: u32, xi: [i64; 4]) -> Result<f64> {
    let [xa, xb, x2, x3] = xi;
    let p = [xa + xb, x2, x3];
    let q = [xb, x2 + xa, x3];
    let xa2 = (xa + x2) as f64;
    match i {
        1 => Ok(((xa + xb) as f64 + xa2) * nu_over_omega(alpha, k1, k3, p)?),
        2 => {
            let d = nu(k1, k3, q) - nu(k1, k3, p);
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok(xa2 * d * inv_omega(alpha, p[0], p[1], p[2])?)
        }
        3 => {
            let n = nu(k1, k3, q);
            if n == 0.0 {
                return Ok(0.0);
            }
            let gap = inv_omega(alpha, q[0], q[1], q[2])? - inv_omega(alpha, p[0], p[1], p[2])?;
            Ok(xa2 * n * gap)
        }
        _ => Err(Error::domain(format!("A' index {i} not in 1..=3"))),
    }
}

/// `ξab ν/Ω(P) + ξ2b ν/Ω(Q)`, the left side of the A-split.
#[cfg(test)]
pub(crate) fn a_target(alpha: f64, k1: u32, k3: u32, xi: [i64; 4]) -> Result<f64> {
    let [xa, xb, x2, x3] = xi;
    Ok((xa + xb) as f64 * nu_over_omega(alpha, k1, k3, [xa + xb, x2, x3])?
        + (x2 + xb) as f64 * nu_over_omega(alpha, k1, k3, [xa, x2 + xb, x3])?)
}

/// `ξab ν/Ω(P) + ξa2 ν/Ω(Q')`, the left side of the A'-split.
#[cfg(test)]
pub(crate) fn a_prime_target(alpha: f64, k1: u32, k3: u32, xi: [i64; 4]) -> Result<f64> {
    let [xa, xb, x2, x3] = xi;
    Ok((xa + xb) as f64 * nu_over_omega(alpha, k1, k3, [xa + xb, x2, x3])?
        + (xa + x2) as f64 * nu_over_omega(alpha, k1, k3, [xb, x2 + xa, x3])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_one_example() {
        let v = sigma_j(1, [5, 5, 2], [32, -36, 4]).unwrap();
        assert_eq!(v, Complex64::new(0.0, -4.0));
    }

    #[test]
    fn sigma_split_identity_small() {
        let k = [4, 4, 1];
        for x3 in -3..=3i64 {
            for x2 in -30..=30i64 {
                let x1 = -x2 - x3;
                let lhs = sigma(k, [x1, x2, x3]) + sigma(k, [x2, x1, x3]);
                let rhs: Complex64 = (1..=3).map(|j| sigma_j(j, k, [x1, x2, x3]).unwrap()).sum();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn m_split_identity_small() {
        let s = FourScales {
            k1: 6,
            ka: 6,
            kb: 2,
            k2: 6,
            k3: 1,
        };
        for xb in [-5i64, -3, 2, 4] {
            for x3 in [-2i64, 1, 3] {
                for xa in 40..=90i64 {
                    let x2 = -(xa + xb + x3);
                    let xi = [xa, xb, x2, x3];
                    let lhs = m_symbol(0.5, s, xi).unwrap()
                        + m_symbol(0.5, s, [x2, xb, xa, x3]).unwrap();
                    let rhs: Complex64 = (1..=5).map(|j| m_family(j, 0.5, s, xi).unwrap()).sum();
                    assert!((lhs - rhs).norm() < 1e-12, "{xi:?}");
                    let m6 = m_family(6, 0.5, s, xi).unwrap();
                    assert!((m6 + m_symbol(0.5, s, [x2, xb, xa, x3]).unwrap()).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn a_split_identity_small() {
        for xb in [-3i64, 1, 5] {
            for x3 in [-2i64, 1] {
                for xa in 50..=80i64 {
                    let x2 = -(xa + xb + x3);
                    let xi = [xa, xb, x2, x3];
                    let lhs = a_target(0.5, 6, 1, xi).unwrap();
                    let rhs: f64 = (1..=3).map(|i| a_family(i, 0.5, 6, 1, xi).unwrap()).sum();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn a_prime_split_identity_small() {
        for xa in [-3i64, 1, 5] {
            for x3 in [-2i64, 1] {
                for xb in 50..=80i64 {
                    let x2 = -(xa + xb + x3);
                    let xi = [xa, xb, x2, x3];
                    let (Ok(lhs), Ok(parts)) = (
                        a_prime_target(0.5, 6, 1, xi),
                        (1..=3)
                            .map(|i| a_prime_family(i, 0.5, 6, 1, xi))
                            .collect::<Result<Vec<f64>>>(),
                    ) else {
                        continue;
                    };
                    let rhs: f64 = parts.iter().sum();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }
}
