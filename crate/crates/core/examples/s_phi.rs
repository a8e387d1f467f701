//! The quadrilinear functional on a static and on a live trajectory.

use dgbo::estimates::{s_phi, Trajectory};
use dgbo::solver::{quartic_integral, solve, DtPolicy, SolverConfig};
use dgbo::{DispersionSpec, SpectralField, TorusGrid};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> dgbo::Result<()> {
    let grid = TorusGrid::new(64)?;
    let u0 = SpectralField::from_positive(grid, |xi| Complex64::new(if xi == 1 { PI } else { 0.0 }, 0.0));
    let one = |_: i64, _: i64, _: i64, _: i64| Complex64::new(1.0, 0.0);

    let st = Trajectory::stationary(&u0, 1.0, 8)?;
    println!("static cos x, T = 1: {:.12}  (6 pi^4 = {:.12})", s_phi(&st, one, 1.0)?.re, 6.0 * PI.powi(4));

    let cfg = SolverConfig::new(DispersionSpec::fractional(0.5)?, grid)
        .with_dt(1e-2, DtPolicy::Fixed)
        .with_horizon(0.5)
        .with_record_every(1)
        .with_snapshots(true);
    let rec = solve(&u0.scale(0.5), &cfg)?;
    let traj = Trajectory::from_record(&rec)?;
    let q: Vec<f64> = rec.snapshots.iter().map(quartic_integral).collect();
    let trapezoid: f64 = rec
        .times
        .windows(2)
        .zip(q.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    let v = s_phi(&traj, one, 0.5)?;
    println!("live, T = 0.5: S = {:.12}, (2 pi)^3 int int u^4 = {:.12}", v.re, (2.0 * PI).powi(3) * trapezoid);

    // a symbol that depends on the frequencies
    let weighted = s_phi(&traj, |a, b, _, _| Complex64::new(((a * b) as f64).abs().sqrt(), 0.0), 0.5)?;
    println!("phi = sqrt|xi1 xi2|: {weighted:.6}");
    Ok(())
}
