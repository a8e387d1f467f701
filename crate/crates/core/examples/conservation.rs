//! Integrates `u0 = cos x` and reports how well mean, mass and Hamiltonian
//! are kept as the step size shrinks.

use dgbo::solver::{solve, DtPolicy, SolverConfig};
use dgbo::{DispersionSpec, SpectralField, TorusGrid};
use num_complex::Complex64;

fn main() -> dgbo::Result<()> {
    let grid = TorusGrid::new(256)?;
    let u0 = SpectralField::from_positive(grid, |xi| {
        Complex64::new(if xi == 1 { std::f64::consts::PI } else { 0.0 }, 0.0)
    });
    println!("{:>9} {:>12} {:>12} {:>12}", "dt", "mean drift", "mass drift", "H drift");
    for dt in [2e-3, 1e-3, 5e-4, 2.5e-4] {
        let cfg = SolverConfig::new(DispersionSpec::fractional(0.5)?, grid)
            .with_dt(dt, DtPolicy::Fixed)
            .with_horizon(1.0)
            .with_record_every(50);
        let rec = solve(&u0, &cfg)?;
        let (mass, ham) = rec.relative_drift();
        println!("{dt:>9.1e} {:>12.2e} {mass:>12.2e} {ham:>12.2e}", rec.mean_drift());
    }
    Ok(())
}
