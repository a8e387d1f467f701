//! Linear flow of a single Fourier mode compared with the exact phase.

use dgbo::solver::{propagate_linear, solve, DtPolicy, SolverConfig};
use dgbo::{DispersionSpec, SpectralField, TorusGrid};
use num_complex::Complex64;

fn main() -> dgbo::Result<()> {
    let grid = TorusGrid::new(64)?;
    let mode = 5;
    let u0 = SpectralField::from_positive(grid, |xi| {
        if xi == mode {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for alpha in [0.25, 0.5, 0.75] {
        let spec = DispersionSpec::fractional(alpha)?;
        let cfg = SolverConfig::new(spec.clone(), grid)
            .with_dt(0.05, DtPolicy::Fixed)
            .with_horizon(1.0)
            .linear_only();
        let rec = solve(&u0, &cfg)?;
        let exact = propagate_linear(&u0, &spec, 1.0)?;
        let err = rec.final_state.sub(&exact)?.max_abs_coeff();
        println!(
            "alpha = {alpha:<4}  omega({mode}) = {:+.6}  u(1)^({mode}) = {:.12}  max error {err:.1e}",
            spec.omega(mode as f64),
            rec.final_state.coeff(mode)
        );
    }
    Ok(())
}
