//! Time integration of `∂t u + ∂x D^α u = ∂x(u²)` and of the generalized
//! equation with an arbitrary admissible dispersion.
//!
//! The state is split as `u = m + v` with the spatial mean `m` constant in
//! time. In Fourier variables
//!
//! ```text
//! v̂_t = i(ω(ξ) + 2mξ) v̂ + iξ (v²)^,
//! ```
//!
//! the linear part is integrated exactly and the quadratic term is dealiased.

mod diagnostics;
mod stepper;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionInfo, DispersionSpec};
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, TorusGrid};

pub use diagnostics::{
    cubic_integral, diagnostics, hamiltonian, quadratic_energy, quartic_integral, Diagnostics,
};
use stepper::Stepper;

/// Coefficient magnitude above which a run is declared blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Etdrk4,
    IntegratingFactorRk4,
}

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    /// Use `dt` exactly (shortened to land on the horizon).
    Fixed,
    /// `dt = min(dt, 0.5 / (N · max|u0 - mean|))`, frozen for the run.
    NonlinearCfl,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dispersion: DispersionSpec,
    pub grid: TorusGrid,
    pub dt: f64,
    pub dt_policy: DtPolicy,
    pub horizon: f64,
    pub integrator: Integrator,
    /// Record diagnostics every this many steps (the final time is always
    /// recorded).
    pub record_every: usize,
    /// Block Sobolev exponents tracked in the diagnostics.
    pub sobolev_s: Vec<f64>,
    pub keep_snapshots: bool,
    /// Test hook: switch the quadratic term off.
    pub nonlinear: bool,
    pub max_steps: usize,
}

impl SolverConfig {
    pub fn new(dispersion: DispersionSpec, grid: TorusGrid) -> Self {
        Self {
            dispersion,
            grid,
            dt: 1e-3,
            dt_policy: DtPolicy::NonlinearCfl,
            horizon: 0.5,
            integrator: Integrator::Etdrk4,
            record_every: 10,
            sobolev_s: Vec::new(),
            keep_snapshots: false,
            nonlinear: true,
            max_steps: 10_000_000,
        }
    }

    pub fn with_dt(mut self, dt: f64, policy: DtPolicy) -> Self {
        self.dt = dt;
        self.dt_policy = policy;
        self
    }

    pub fn with_horizon(mut self, t: f64) -> Self {
        self.horizon = t;
        self
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    pub fn with_sobolev(mut self, s: Vec<f64>) -> Self {
        self.sobolev_s = s;
        self
    }

    pub fn with_snapshots(mut self, keep: bool) -> Self {
        self.keep_snapshots = keep;
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn echo(&self) -> SolverEcho {
        SolverEcho {
            dispersion: self.dispersion.info(),
            n_points: self.grid.n_points(),
            dt: self.dt,
            dt_policy: self.dt_policy,
            horizon: self.horizon,
            integrator: self.integrator,
            record_every: self.record_every,
            sobolev_s: self.sobolev_s.clone(),
            nonlinear: self.nonlinear,
        }
    }
}

/// Serializable summary of a [`SolverConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEcho {
    pub dispersion: DispersionInfo,
    pub n_points: usize,
    pub dt: f64,
    pub dt_policy: DtPolicy,
    pub horizon: f64,
    pub integrator: Integrator,
    pub record_every: usize,
    pub sobolev_s: Vec<f64>,
    pub nonlinear: bool,
}

/// Time series produced by [`solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: SolverEcho,
    pub dt_used: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub diagnostics: Vec<Diagnostics>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<SpectralField>,
    pub final_state: SpectralField,
}

impl RunRecord {
    pub fn sup_sobolev(&self, idx: usize) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.sobolev[idx])
            .fold(0.0, f64::max)
    }

    /// Largest relative deviation of mass and Hamiltonian from their initial
    /// values, as `(mass, hamiltonian)`.
    pub fn relative_drift(&self) -> (f64, f64) {
        let first = &self.diagnostics[0];
        let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };
        let mut dm: f64 = 0.0;
        let mut dh: f64 = 0.0;
        for d in &self.diagnostics {
            dm = dm.max(rel(d.mass, first.mass));
            dh = dh.max(rel(d.hamiltonian, first.hamiltonian));
        }
        (dm, dh)
    }

    /// Largest absolute deviation of the mean mode.
    pub fn mean_drift(&self) -> f64 {
        let m0 = self.diagnostics[0].mean;
        self.diagnostics
            .iter()
            .map(|d| (d.mean - m0).abs())
            .fold(0.0, f64::max)
    }
}

/// `∂x(u²)` with the product dealiased.
pub fn nonlinearity(u: &SpectralField) -> Result<SpectralField> {
    let sq = u.product_dealiased(u)?;
    let mut out = sq.apply_multiplier(|xi| Complex64::new(0.0, xi as f64))?;
    out.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    Ok(out)
}

/// Exact linear flow `û ↦ e^{iω(ξ)t} û`.
pub fn propagate_linear(u: &SpectralField, spec: &DispersionSpec, t: f64) -> Result<SpectralField> {
    u.apply_multiplier(|xi| Complex64::from_polar(1.0, spec.omega(xi as f64) * t))
}

fn linear_symbol(grid: TorusGrid, spec: &DispersionSpec) -> Vec<Complex64> {
    (0..grid.n_points())
        .map(|i| Complex64::new(0.0, spec.omega(grid.frequency(i) as f64)))
        .collect()
}

fn fluctuation(u: &SpectralField) -> (f64, SpectralField) {
    let mean = u.spatial_mean();
    let mut v = u.clone();
    v.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    (mean, v)
}

fn check_state(u: &SpectralField, t: f64, last: &Diagnostics) -> Result<()> {
    let reason = if !u.is_finite() {
        Some("non-finite coefficient".to_string())
    } else {
        let m = u.max_abs_coeff();
        (m > BLOW_UP_THRESHOLD).then(|| format!("max |û| = {m:.3e} exceeds {BLOW_UP_THRESHOLD:e}"))
    };
    match reason {
        Some(reason) => Err(Error::BlowUp {
            time: t,
            reason,
            last_finite: Some(Box::new(last.clone())),
        }),
        None => Ok(()),
    }
}

/// Evolves the fluctuation `z = u - m` in the frame moving with the mean.
///
/// With `u = m + w`, the fluctuation obeys `w_t + ∂x D^α w = ∂x(w²) + 2m w_x`,
/// and `w(t, x) = z(t, x + 2mt)` where `z` solves the mean-free equation. The
/// mean therefore only enters through an exact phase when the state is
/// reassembled, which keeps the Galilean identity at roundoff level.
struct Propagator {
    stepper: Stepper,
    mean: f64,
    mean_mode: f64,
    nonlinear: bool,
}

impl Propagator {
    fn new(cfg: &SolverConfig, u: &SpectralField, dt: f64) -> Self {
        let symbol = linear_symbol(cfg.grid, &cfg.dispersion);
        Self {
            stepper: Stepper::new(cfg.integrator, &symbol, dt),
            mean: u.spatial_mean(),
            mean_mode: u.mean_mode(),
            nonlinear: cfg.nonlinear,
        }
    }

    fn advance(&self, z: &SpectralField) -> Result<SpectralField> {
        if self.nonlinear {
            self.stepper.advance(z, &nonlinearity)
        } else {
            self.stepper
                .advance(z, &|w: &SpectralField| Ok(SpectralField::zeros(w.grid())))
        }
    }

    /// Full state at time `t` from the co-moving fluctuation.
    fn assemble(&self, z: &SpectralField, t: f64) -> SpectralField {
        let mut u = if self.mean == 0.0 {
            z.clone()
        } else {
            z.translate(2.0 * self.mean * t)
        };
        u.coeffs_mut()[0] = Complex64::new(self.mean_mode, 0.0);
        u
    }
}

/// One integrator step of size `dt` from `state`.
pub fn step(state: &SpectralField, dt: f64, cfg: &SolverConfig) -> Result<SpectralField> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::config(format!("dt must be positive, got {dt}")));
    }
    if state.grid() != cfg.grid {
        return Err(Error::config("state grid does not match the solver grid"));
    }
    let p = Propagator::new(cfg, state, dt);
    let (_, z) = fluctuation(state);
    let out = p.assemble(&p.advance(&z)?, dt);
    let d = diagnostics(state, &cfg.dispersion, &[], 0.0);
    check_state(&out, dt, &d)?;
    Ok(out)
}

/// Step size the configured policy would use for `u0`.
pub fn effective_dt(u0: &SpectralField, cfg: &SolverConfig) -> f64 {
    match cfg.dt_policy {
        DtPolicy::Fixed => cfg.dt,
        DtPolicy::NonlinearCfl => {
            let (_, v) = fluctuation(u0);
            let amp = v.to_physical().iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if amp > 0.0 {
                cfg.dt.min(0.5 / (cfg.grid.n_points() as f64 * amp))
            } else {
                cfg.dt
            }
        }
    }
}

/// Integrates from `u0` over `[0, horizon]`.
///
/// `u0` is first restricted to the dealiased band `|ξ| <= N/3`, on which the
/// semi-discrete flow conserves mean, mass and Hamiltonian exactly.
pub fn solve(u0: &SpectralField, cfg: &SolverConfig) -> Result<RunRecord> {
    if u0.grid() != cfg.grid {
        return Err(Error::config("initial datum grid does not match the solver grid"));
    }
    if !(cfg.horizon >= 0.0) || !cfg.horizon.is_finite() {
        return Err(Error::config("horizon must be a nonnegative number"));
    }
    if !(cfg.dt > 0.0) || !cfg.dt.is_finite() {
        return Err(Error::config(format!("dt must be positive, got {}", cfg.dt)));
    }
    if !u0.is_finite() {
        return Err(Error::numeric("initial datum is not finite"));
    }
    let mut u = u0.truncate(cfg.grid.dealias_cutoff());
    u.symmetrize();

    let dt_target = effective_dt(&u, cfg);
    let steps_f = (cfg.horizon / dt_target).ceil();
    if steps_f > cfg.max_steps as f64 {
        return Err(Error::resource(format!(
            "horizon {} needs {steps_f} steps of size {dt_target:.3e}, above the limit {}",
            cfg.horizon, cfg.max_steps
        )));
    }
    let steps = steps_f as usize;
    let dt = if steps == 0 { 0.0 } else { cfg.horizon / steps as f64 };

    let record_every = cfg.record_every.max(1);
    let mut times = vec![0.0];
    let mut diags = vec![diagnostics(&u, &cfg.dispersion, &cfg.sobolev_s, 0.0)];
    let mut snapshots = Vec::new();
    if cfg.keep_snapshots {
        snapshots.push(u.clone());
    }

    if steps > 0 {
        let p = Propagator::new(cfg, &u, dt);
        let (_, mut z) = fluctuation(&u);
        for n in 1..=steps {
            let t = n as f64 * dt;
            let next = p.advance(&z)?;
            check_state(&next, t, diags.last().expect("initial diagnostics"))?;
            z = next;
            if n % record_every == 0 || n == steps {
                u = p.assemble(&z, t);
                times.push(t);
                diags.push(diagnostics(&u, &cfg.dispersion, &cfg.sobolev_s, t));
                if cfg.keep_snapshots {
                    snapshots.push(u.clone());
                }
            }
        }
    }

    Ok(RunRecord {
        config: cfg.echo(),
        dt_used: dt,
        steps,
        times,
        diagnostics: diags,
        snapshots,
        final_state: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::to_spectral;

    fn field<F: Fn(f64) -> f64>(n: usize, f: F) -> SpectralField {
        let g = TorusGrid::new(n).unwrap();
        let s: Vec<f64> = g.points().into_iter().map(f).collect();
        to_spectral(g, &s).unwrap()
    }

    #[test]
    fn nonlinearity_examples() {
        let u = field(32, f64::cos);
        let n = nonlinearity(&u).unwrap().to_physical();
        let g = u.grid();
        for (x, v) in g.points().iter().zip(&n) {
            assert!((v + (2.0 * x).sin()).abs() < 1e-13);
        }
        let c = field(32, |_| 2.5);
        assert!(nonlinearity(&c).unwrap().max_abs_coeff() < 1e-12);
    }

    #[test]
    fn zero_dt_is_identity() {
        let u = field(32, |x| x.cos() + 0.2);
        let cfg = SolverConfig::new(DispersionSpec::fractional(0.5).unwrap(), u.grid());
        assert_eq!(step(&u, 0.0, &cfg).unwrap(), u);
    }

    #[test]
    fn linear_step_is_exact_rotation() {
        let u = field(32, |x| (5.0 * x).cos());
        let spec = DispersionSpec::fractional(0.5).unwrap();
        let cfg = SolverConfig::new(spec.clone(), u.grid()).linear_only();
        let dt = 0.37;
        let out = step(&u, dt, &cfg).unwrap();
        let want = Complex64::from_polar(1.0, spec.omega(5.0) * dt) * u.coeff(5);
        assert!((out.coeff(5) - want).norm() < 1e-12);
    }

    #[test]
    fn zero_datum_stays_zero() {
        let g = TorusGrid::new(32).unwrap();
        let cfg = SolverConfig::new(DispersionSpec::fractional(0.5).unwrap(), g)
            .with_sobolev(vec![1.0])
            .with_horizon(0.1);
        let rec = solve(&SpectralField::zeros(g), &cfg).unwrap();
        for d in &rec.diagnostics {
            assert_eq!((d.mean, d.mass, d.hamiltonian, d.sobolev[0]), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn blow_up_reported() {
        let u = field(32, |x| 1e9 * x.cos());
        let cfg = SolverConfig::new(DispersionSpec::fractional(0.5).unwrap(), u.grid())
            .with_dt(1e-3, DtPolicy::Fixed)
            .with_horizon(0.01);
        match solve(&u, &cfg) {
            Err(Error::BlowUp { last_finite, .. }) => assert!(last_finite.is_some()),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn unreachable_horizon() {
        let u = field(32, f64::cos);
        let mut cfg = SolverConfig::new(DispersionSpec::fractional(0.5).unwrap(), u.grid())
            .with_dt(1e-3, DtPolicy::Fixed)
            .with_horizon(1.0);
        cfg.max_steps = 10;
        assert!(matches!(solve(&u, &cfg), Err(Error::Resource(_))));
    }

    #[test]
    fn integrators_agree() {
        let u = field(64, |x| 0.3 * x.cos() + 0.1 * (2.0 * x).sin());
        let spec = DispersionSpec::fractional(0.5).unwrap();
        let base = SolverConfig::new(spec, u.grid())
            .with_dt(1e-3, DtPolicy::Fixed)
            .with_horizon(0.2);
        let a = solve(&u, &base).unwrap().final_state;
        let b = solve(&u, &base.clone().with_integrator(Integrator::IntegratingFactorRk4))
            .unwrap()
            .final_state;
        assert!(a.sub(&b).unwrap().l2_norm() < 1e-9);
    }
}
