//! The time-integrated quadrilinear sum
//! `S_φ(u1, u2, u3, u4)(T) = ∫_0^T Σ_{ξ1+ξ2+ξ3+ξ4=0} φ(ξ) û1(ξ1) û2(ξ2) û3(ξ3) û4(ξ4) dt`
//! over nonzero frequencies.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::RunRecord;
use crate::spectral::SpectralField;

/// Snapshots `u(t_i)` at increasing times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::config("trajectory needs one state per time and at least one"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("trajectory times must increase"));
        }
        let g = states[0].grid();
        if states.iter().any(|s| s.grid() != g) {
            return Err(Error::config("trajectory states live on different grids"));
        }
        Ok(Self { times, states })
    }

    /// Snapshots kept by the solver (requires `keep_snapshots`).
    pub fn from_record(rec: &RunRecord) -> Result<Self> {
        if rec.snapshots.is_empty() {
            return Err(Error::config("run record carries no snapshots"));
        }
        Self::new(rec.times.clone(), rec.snapshots.clone())
    }

    /// `u` held fixed on `[0, t_end]`, sampled at `samples + 1` times.
    pub fn stationary(u: &SpectralField, t_end: f64, samples: usize) -> Result<Self> {
        let samples = samples.max(1);
        let times = (0..=samples)
            .map(|i| t_end * i as f64 / samples as f64)
            .collect();
        Self::new(times, vec![u.clone(); samples + 1])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }
}

fn band(trajs: &[&Trajectory; 4]) -> i64 {
    let mut b = 0;
    for t in trajs {
        for s in &t.states {
            let g = s.grid();
            for xi in g.frequencies() {
                if xi.abs() > b && s.coeff(xi).norm() > 0.0 {
                    b = xi.abs();
                }
            }
        }
    }
    b
}

fn instantaneous<F>(u: [&SpectralField; 4], phi: &F, b: i64) -> Complex64
where
    F: Fn(i64, i64, i64, i64) -> Complex64 + Sync,
{
    let c = |i: usize, xi: i64| -> Complex64 {
        if xi == 0 || xi.abs() > b {
            Complex64::new(0.0, 0.0)
        } else {
            u[i].coeff(xi)
        }
    };
    let xs: Vec<i64> = (-b..=b).filter(|&x| x != 0).collect();
    let parts: Vec<Complex64> = xs
        .par_iter()
        .map(|&x1| {
            let a1 = c(0, x1);
            let mut acc = Complex64::new(0.0, 0.0);
            if a1.norm() == 0.0 {
                return acc;
            }
            for &x2 in &xs {
                let a12 = a1 * c(1, x2);
                if a12.norm() == 0.0 {
                    continue;
                }
                for &x3 in &xs {
                    let x4 = -x1 - x2 - x3;
                    if x4 == 0 || x4.abs() > b {
                        continue;
                    }
                    let a = a12 * c(2, x3) * c(3, x4);
                    if a.norm() != 0.0 {
                        acc += phi(x1, x2, x3, x4) * a;
                    }
                }
            }
            acc
        })
        .collect();
    parts.iter().sum()
}

/// `S_φ(u1, u2, u3, u4)(T)` by the trapezoidal rule over the common
/// snapshot times, with linear interpolation of the integrand inside the
/// last interval. Frequencies are summed exactly over the resolved band.
pub fn s_phi_multi<F>(trajs: [&Trajectory; 4], phi: F, t: f64) -> Result<Complex64>
where
    F: Fn(i64, i64, i64, i64) -> Complex64 + Sync,
{
    let times = &trajs[0].times;
    if trajs.iter().any(|tr| tr.times != *times) {
        return Err(Error::config("trajectories must share their sample times"));
    }
    let t0 = times[0];
    let t_last = *times.last().expect("nonempty");
    let tol = 1e-12 * t_last.abs().max(1.0);
    if !(t >= t0 - tol) || t > t_last + tol {
        return Err(Error::domain(format!(
            "T = {t} lies outside the trajectory interval [{t0}, {t_last}]"
        )));
    }
    let b = band(&trajs);
    let value_at = |i: usize| {
        instantaneous(
            [
                &trajs[0].states[i],
                &trajs[1].states[i],
                &trajs[2].states[i],
                &trajs[3].states[i],
            ],
            &phi,
            b,
        )
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev = value_at(0);
    for i in 1..times.len() {
        if times[i - 1] >= t - tol {
            break;
        }
        let cur = value_at(i);
        let h = times[i] - times[i - 1];
        if times[i] <= t + tol {
            total += 0.5 * h * (prev + cur);
        } else {
            let s = t - times[i - 1];
            let at_t = prev + (cur - prev) * (s / h);
            total += 0.5 * s * (prev + at_t);
            break;
        }
        prev = cur;
    }
    Ok(total)
}

/// `S_φ(u, u, u, u)(T)`.
pub fn s_phi<F>(traj: &Trajectory, phi: F, t: f64) -> Result<Complex64>
where
    F: Fn(i64, i64, i64, i64) -> Complex64 + Sync,
{
    s_phi_multi([traj, traj, traj, traj], phi, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use std::f64::consts::PI;

    fn cos_x(n: usize) -> SpectralField {
        let g = TorusGrid::new(n).unwrap();
        SpectralField::from_positive(g, |xi| if xi == 1 { Complex64::new(PI, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    #[test]
    fn static_cosine() {
        let tr = Trajectory::stationary(&cos_x(16), 2.0, 4).unwrap();
        let v = s_phi(&tr, |_, _, _, _| Complex64::new(1.0, 0.0), 2.0).unwrap();
        let want = 6.0 * PI.powi(4) * 2.0;
        assert!((v.re - want).abs() < 1e-10 * want && v.im.abs() < 1e-10);
        let zero = s_phi(&tr, |_, _, _, _| Complex64::new(0.0, 0.0), 2.0).unwrap();
        assert_eq!(zero, Complex64::new(0.0, 0.0));
        let half = s_phi(&tr, |_, _, _, _| Complex64::new(1.0, 0.0), 0.7).unwrap();
        assert!((half.re - 6.0 * PI.powi(4) * 0.7).abs() < 1e-10 * want);
    }

    #[test]
    fn horizon_outside_trajectory() {
        let tr = Trajectory::stationary(&cos_x(16), 1.0, 2).unwrap();
        assert!(matches!(
            s_phi(&tr, |_, _, _, _| Complex64::new(1.0, 0.0), 1.5),
            Err(Error::Domain(_))
        ));
    }
}
