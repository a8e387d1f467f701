//! Scenario probes: a-priori growth, difference estimates, Bona–Smith
//! approximation, Galilean and scaling symmetries, and norm tracking near
//! the regularity threshold `s = 3/2 - α`.

mod datum;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionSpec;
use crate::error::{Error, Result};
use crate::littlewood_paley::{chi_k_support, lp_project_gt, lp_project_le, sobolev_norm};
use crate::solver::{effective_dt, solve, DtPolicy, Integrator, RunRecord, SolverConfig};
use crate::spectral::{SpectralField, TorusGrid};
use crate::stats;

pub use datum::{packet_datum, random_smooth_datum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Apriori,
    DifferenceLow,
    DifferenceHs,
    BonaSmith,
    Galilean,
    Scaling,
    ThresholdProbe,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Apriori,
        ScenarioKind::DifferenceLow,
        ScenarioKind::DifferenceHs,
        ScenarioKind::BonaSmith,
        ScenarioKind::Galilean,
        ScenarioKind::Scaling,
        ScenarioKind::ThresholdProbe,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ScenarioKind::Apriori => "apriori",
            ScenarioKind::DifferenceLow => "difference-low",
            ScenarioKind::DifferenceHs => "difference-hs",
            ScenarioKind::BonaSmith => "bona-smith",
            ScenarioKind::Galilean => "galilean",
            ScenarioKind::Scaling => "scaling",
            ScenarioKind::ThresholdProbe => "threshold-probe",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|k| k.id()).collect();
                Error::config(format!("unknown scenario '{id}' (expected one of {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub alpha: f64,
    pub s: f64,
    /// Norm index of the a-priori ratio; defaults to `s`.
    pub r: Option<f64>,
    pub n_points: usize,
    pub horizon: f64,
    /// Upper bound on the step; paired runs share one fixed step.
    pub dt: f64,
    pub integrator: Integrator,
    pub seed: u64,
    pub data_count: usize,
    /// `‖u0‖_{H^s}`; zero gives the zero datum.
    pub amplitude: f64,
    pub ratio_cap: f64,
    /// Perturbation size, measured in the norm of the probe.
    pub delta: f64,
    pub n_grid: Vec<u32>,
    pub lambdas: Vec<u32>,
    pub c_values: Vec<f64>,
    pub tolerance: f64,
    pub packet_freqs: Vec<i64>,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            alpha: 0.5,
            s: 1.1,
            r: None,
            n_points: if kind == ScenarioKind::BonaSmith { 1024 } else { 256 },
            horizon: 0.5,
            dt: 1e-3,
            integrator: Integrator::Etdrk4,
            seed: 0,
            data_count: 20,
            amplitude: 1.0,
            ratio_cap: 10.0,
            delta: 1e-3,
            n_grid: (3..=7).collect(),
            lambdas: vec![2, 3],
            c_values: vec![0.3, 1.0],
            tolerance: 1e-6,
            packet_freqs: vec![16, 32, 64],
        }
    }

    pub fn threshold(&self) -> f64 {
        1.5 - self.alpha
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha must lie in (0,1)"));
        }
        let needs_threshold = matches!(
            self.kind,
            ScenarioKind::Apriori | ScenarioKind::DifferenceHs | ScenarioKind::BonaSmith
        );
        if needs_threshold && !(self.s > self.threshold()) {
            return Err(Error::config(format!(
                "s must exceed 3/2 - alpha = {} for the {} scenario (got s = {})",
                self.threshold(),
                self.kind.id(),
                self.s
            )));
        }
        if let Some(r) = self.r {
            if !(r >= self.s) {
                return Err(Error::config(format!("r must satisfy r >= s (got r = {r}, s = {})", self.s)));
            }
        }
        TorusGrid::new(self.n_points)?;
        if !(self.horizon > 0.0 && self.dt > 0.0) {
            return Err(Error::config("horizon and dt must be positive"));
        }
        if !(self.amplitude >= 0.0) || !(self.delta > 0.0) || !(self.ratio_cap > 0.0) {
            return Err(Error::config("amplitude must be nonnegative, delta and ratio_cap positive"));
        }
        if self.data_count == 0 {
            return Err(Error::config("data_count must be at least 1"));
        }
        match self.kind {
            ScenarioKind::BonaSmith => {
                if self.n_grid.is_empty() {
                    return Err(Error::config("n_grid must not be empty"));
                }
                let top = *self.n_grid.iter().max().expect("nonempty");
                let cut = self.n_points as i64 / 3;
                if (chi_k_support(top).1 as i64) >= cut {
                    return Err(Error::config(format!(
                        "P_{{>{top}}} needs the dealiased band |ξ| <= {cut} to reach past {}; raise n_points",
                        chi_k_support(top).1
                    )));
                }
            }
            ScenarioKind::Scaling if self.lambdas.iter().any(|&l| l < 1) => {
                return Err(Error::config("scaling factors must be positive integers"));
            }
            ScenarioKind::ThresholdProbe => {
                let cut = self.n_points as i64 / 3;
                if self.packet_freqs.iter().any(|&p| p < 2 || p > cut) {
                    return Err(Error::config(format!("packet frequencies must lie in [2, {cut}]")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.n_points)
    }

    fn dispersion(&self) -> Result<DispersionSpec> {
        DispersionSpec::fractional(self.alpha)
    }

    fn solver(&self, grid: TorusGrid, sobolev: Vec<f64>) -> Result<SolverConfig> {
        Ok(SolverConfig::new(self.dispersion()?, grid)
            .with_dt(self.dt, DtPolicy::NonlinearCfl)
            .with_horizon(self.horizon)
            .with_integrator(self.integrator)
            .with_sobolev(sobolev))
    }

    /// Seed of the `i`-th datum derived from the top-level seed.
    pub fn datum_seed(&self, i: usize) -> u64 {
        let mut h = self.seed ^ 0xD1B5_4A32_D192_ED03;
        h = (h ^ i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        h ^ (h >> 31)
    }
}

/// One reported ratio with its defining values; `ratio` is `None` for `0/0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    pub label: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: Option<f64>,
}

impl RatioEntry {
    fn new(label: impl Into<String>, numerator: f64, denominator: f64) -> Self {
        let ratio = if denominator == 0.0 && numerator == 0.0 {
            None
        } else {
            Some(numerator / denominator)
        };
        Self {
            label: label.into(),
            numerator,
            denominator,
            ratio,
        }
    }
}

/// Condensed view of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub steps: usize,
    pub dt_used: f64,
    pub final_time: f64,
    pub mass_drift: f64,
    pub hamiltonian_drift: f64,
}

impl RunSummary {
    fn of(label: impl Into<String>, rec: &RunRecord) -> Self {
        let (m, h) = rec.relative_drift();
        Self {
            label: label.into(),
            steps: rec.steps,
            dt_used: rec.dt_used,
            final_time: *rec.times.last().unwrap_or(&0.0),
            mass_drift: m,
            hamiltonian_drift: h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub kind: ScenarioKind,
    pub config: ScenarioConfig,
    pub entries: Vec<RatioEntry>,
    /// Named summary statistics (trend slopes, maximal changes, exponents).
    pub statistics: Vec<(String, f64)>,
    /// `None` for exploratory scenarios.
    pub pass: Option<bool>,
    pub blow_up: Option<String>,
    pub runs: Vec<RunSummary>,
}

impl ScenarioReport {
    fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            kind: cfg.kind,
            config: cfg.clone(),
            entries: Vec::new(),
            statistics: Vec::new(),
            pass: None,
            blow_up: None,
            runs: Vec::new(),
        }
    }

    pub fn statistic(&self, name: &str) -> Option<f64> {
        self.statistics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.entries.iter().filter_map(|e| e.ratio).collect()
    }
}

/// Runs the scenario. A blow-up ends the scenario early with a partial
/// report (`pass = false`, `blow_up` set).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let mut report = ScenarioReport::new(cfg);
    let outcome = match cfg.kind {
        ScenarioKind::Apriori => apriori(cfg, &mut report),
        ScenarioKind::DifferenceLow => difference(cfg, -0.5, &mut report),
        ScenarioKind::DifferenceHs => difference(cfg, cfg.s, &mut report),
        ScenarioKind::BonaSmith => bona_smith(cfg, &mut report),
        ScenarioKind::Galilean => galilean(cfg, &mut report),
        ScenarioKind::Scaling => scaling(cfg, &mut report),
        ScenarioKind::ThresholdProbe => threshold_probe(cfg, &mut report),
    };
    match outcome {
        Ok(()) => Ok(report),
        Err(Error::BlowUp { time, reason, .. }) => {
            report.blow_up = Some(format!("t = {time}: {reason}"));
            report.pass = Some(false);
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

fn datum(cfg: &ScenarioConfig, grid: TorusGrid, i: usize) -> Result<SpectralField> {
    if cfg.amplitude == 0.0 {
        Ok(SpectralField::zeros(grid))
    } else {
        random_smooth_datum(grid, cfg.s, cfg.amplitude, cfg.datum_seed(i))
    }
}

/// `sup_t ‖a(t) - b(t)‖_{H^s}` over the common snapshot times.
fn sup_difference(a: &RunRecord, b: &RunRecord, s: f64) -> Result<f64> {
    let mut m: f64 = 0.0;
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        m = m.max(sobolev_norm(&x.sub(y)?, s));
    }
    Ok(m)
}

/// Runs all data through a shared fixed step so their snapshots align.
fn paired_runs(cfg: &SolverConfig, data: &[SpectralField]) -> Result<Vec<RunRecord>> {
    let dt = data
        .iter()
        .map(|u| effective_dt(&u.truncate(cfg.grid.dealias_cutoff()), cfg))
        .fold(cfg.dt, f64::min);
    let fixed = cfg.clone().with_dt(dt, DtPolicy::Fixed).with_snapshots(true);
    data.par_iter().map(|u| solve(u, &fixed)).collect()
}

fn apriori(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let grid = cfg.grid()?;
    let r = cfg.r.unwrap_or(cfg.s);
    let solver = cfg.solver(grid, vec![r])?;
    let runs: Vec<Result<(SpectralField, RunRecord)>> = (0..cfg.data_count)
        .into_par_iter()
        .map(|i| {
            let u0 = datum(cfg, grid, i)?;
            let rec = solve(&u0, &solver)?;
            Ok((u0, rec))
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, run) in runs.into_iter().enumerate() {
        let (u0, rec) = run?;
        let e = RatioEntry::new(format!("datum {i}"), rec.sup_sobolev(0), sobolev_norm(&u0, r));
        worst = worst.max(e.ratio.unwrap_or(0.0));
        rep.entries.push(e);
        rep.runs.push(RunSummary::of(format!("datum {i}"), &rec));
    }
    rep.statistics.push(("max_ratio".into(), worst));
    rep.pass = Some(rep.entries.iter().all(|e| e.ratio.is_none_or(|x| x <= cfg.ratio_cap)));
    Ok(())
}

fn difference(cfg: &ScenarioConfig, norm_s: f64, rep: &mut ScenarioReport) -> Result<()> {
    let grid = cfg.grid()?;
    let solver = cfg.solver(grid, vec![norm_s])?;
    let mut changes = Vec::new();
    for i in 0..cfg.data_count {
        let u0 = datum(cfg, grid, i)?;
        // perturbation direction from an independent seed stream
        let dir = random_smooth_datum(grid, cfg.s, 1.0, cfg.datum_seed(i) ^ 0xA5A5_A5A5)?;
        let dir = dir.scale(1.0 / sobolev_norm(&dir, norm_s));
        let data = vec![
            u0.clone(),
            u0.add(&dir.scale(cfg.delta))?,
            u0.add(&dir.scale(cfg.delta / 2.0))?,
        ];
        let recs = paired_runs(&solver, &data)?;
        let mut pair = Vec::new();
        for (j, d) in [cfg.delta, cfg.delta / 2.0].iter().enumerate() {
            let v0 = sobolev_norm(&recs[0].snapshots[0].sub(&recs[j + 1].snapshots[0])?, norm_s);
            let sup = sup_difference(&recs[0], &recs[j + 1], norm_s)?;
            let e = RatioEntry::new(format!("datum {i}, delta {d:e}"), sup, v0);
            pair.push(e.ratio.unwrap_or(0.0));
            rep.entries.push(e);
        }
        changes.push((pair[1] - pair[0]).abs() / pair[0]);
        for (j, rec) in recs.iter().enumerate() {
            rep.runs.push(RunSummary::of(format!("datum {i}, run {j}"), rec));
        }
    }
    let max_change = changes.iter().copied().fold(0.0, f64::max);
    let max_ratio = rep.ratios().into_iter().fold(0.0, f64::max);
    rep.statistics.push(("max_ratio".into(), max_ratio));
    rep.statistics.push(("max_halving_change".into(), max_change));
    rep.pass = Some(max_ratio.is_finite() && max_ratio <= cfg.ratio_cap && max_change <= 0.2);
    Ok(())
}

fn bona_smith(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let grid = cfg.grid()?;
    let solver = cfg.solver(grid, vec![cfg.s])?;
    let u0 = datum(cfg, grid, 0)?;
    let mut data = vec![u0.clone()];
    data.extend(cfg.n_grid.iter().map(|&n| lp_project_le(&u0, n)));
    let recs = paired_runs(&solver, &data)?;
    let mut tails = Vec::new();
    let mut rn = Vec::new();
    for (j, &n) in cfg.n_grid.iter().enumerate() {
        let tail = sobolev_norm(&lp_project_gt(&u0, n), cfg.s);
        let sup = sup_difference(&recs[0], &recs[j + 1], cfg.s)?;
        let e = RatioEntry::new(format!("n = {n}"), sup, tail);
        rn.push(e.ratio.unwrap_or(0.0));
        tails.push(tail);
        rep.entries.push(e);
    }
    for (j, rec) in recs.iter().enumerate() {
        rep.runs.push(RunSummary::of(format!("run {j}"), rec));
    }
    let tails_monotone = tails.windows(2).all(|w| w[1] <= w[0]);
    let xs: Vec<f64> = cfg.n_grid.iter().map(|&n| n as f64).collect();
    let slope = stats::linear_fit(&xs, &rn).slope;
    let max_r = rn.iter().copied().fold(0.0, f64::max);
    rep.statistics.push(("max_ratio".into(), max_r));
    rep.statistics.push(("trend_slope".into(), slope));
    rep.statistics.push(("tails_monotone".into(), if tails_monotone { 1.0 } else { 0.0 }));
    rep.pass = Some(tails_monotone && max_r <= cfg.ratio_cap && slope <= 0.0);
    Ok(())
}

/// Largest `L²` distance between `S(u0 + c)(t)` and `S(u0)(t, · + 2ct) + c`.
fn galilean_residual(fixed: &SolverConfig, base: &RunRecord, u0: &SpectralField, c: f64) -> Result<f64> {
    let moved = solve(&u0.add_constant(c), fixed)?;
    let mut worst: f64 = 0.0;
    for ((t, a), b) in base.times.iter().zip(&base.snapshots).zip(&moved.snapshots) {
        let expected = a.translate(2.0 * c * t).add_constant(c);
        worst = worst.max(b.sub(&expected)?.l2_norm());
    }
    Ok(worst)
}

fn galilean(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let grid = cfg.grid()?;
    let solver = cfg.solver(grid, vec![])?;
    let u0 = datum(cfg, grid, 0)?;
    let u0 = u0.truncate(grid.dealias_cutoff());
    let fixed = solver
        .clone()
        .with_dt(effective_dt(&u0, &solver), DtPolicy::Fixed)
        .with_snapshots(true);
    let base = solve(&u0, &fixed)?;
    rep.runs.push(RunSummary::of("base", &base));
    let mut worst: f64 = 0.0;
    for &c in &cfg.c_values {
        let res = galilean_residual(&fixed, &base, &u0, c)?;
        rep.entries.push(RatioEntry::new(format!("c = {c}"), res, 1.0));
        worst = worst.max(res);
    }
    rep.statistics.push(("max_residual".into(), worst));
    rep.pass = Some(worst <= 1e-8);
    Ok(())
}

/// `v̂(λξ) = λ^α û(ξ)` on a grid `λ` times finer.
pub fn rescale_datum(u: &SpectralField, lambda: u32, alpha: f64) -> Result<SpectralField> {
    let g = u.grid();
    let fine = TorusGrid::new(g.n_points() * lambda as usize)?;
    let l = lambda as i64;
    let amp = (lambda as f64).powf(alpha);
    let half = g.n_points() as i64 / 2;
    Ok(SpectralField::from_positive(fine, |xi| {
        if xi % l == 0 && xi / l < half {
            u.coeff(xi / l) * amp
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    }))
}

fn scaling(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let grid = cfg.grid()?;
    let spec = cfg.dispersion()?;
    let u0 = datum(cfg, grid, 0)?.truncate(grid.dealias_cutoff());
    let base_dt = effective_dt(
        &u0,
        &SolverConfig::new(spec.clone(), grid).with_dt(cfg.dt, DtPolicy::NonlinearCfl),
    );
    let mut worst: f64 = 0.0;
    for &lambda in &cfg.lambdas {
        let stretch = (lambda as f64).powf(1.0 + cfg.alpha);
        let v0 = rescale_datum(&u0, lambda, cfg.alpha)?;
        // u runs to λ^{1+α}T with step dt; v runs to T with step dt/λ^{1+α}
        // both runs take the same number of steps; the slack keeps the
        // step count from rounding up
        let steps = (cfg.horizon * stretch / base_dt).ceil().max(1.0);
        let slack = 1.0 + 1e-12;
        let cfg_u = SolverConfig::new(spec.clone(), grid)
            .with_dt(cfg.horizon * stretch / steps * slack, DtPolicy::Fixed)
            .with_horizon(cfg.horizon * stretch)
            .with_integrator(cfg.integrator);
        let cfg_v = SolverConfig::new(spec.clone(), v0.grid())
            .with_dt(cfg.horizon / steps * slack, DtPolicy::Fixed)
            .with_horizon(cfg.horizon)
            .with_integrator(cfg.integrator);
        let (ru, rv) = rayon::join(|| solve(&u0, &cfg_u), || solve(&v0, &cfg_v));
        let (ru, rv) = (ru?, rv?);
        let predicted = rescale_datum(&ru.final_state, lambda, cfg.alpha)?;
        let diff = rv.final_state.sub(&predicted)?.l2_norm();
        let norm = rv.final_state.l2_norm();
        let e = RatioEntry::new(format!("lambda = {lambda}"), diff, norm);
        worst = worst.max(e.ratio.unwrap_or(0.0));
        rep.entries.push(e);
        rep.runs.push(RunSummary::of(format!("u, lambda = {lambda}"), &ru));
        rep.runs.push(RunSummary::of(format!("v, lambda = {lambda}"), &rv));
    }
    rep.statistics.push(("max_relative_mismatch".into(), worst));
    rep.pass = Some(worst <= cfg.tolerance);
    Ok(())
}

fn threshold_probe(cfg: &ScenarioConfig, rep: &mut ScenarioReport) -> Result<()> {
    let grid = cfg.grid()?;
    let amp = if cfg.amplitude > 0.0 { cfg.amplitude } else { 1.0 };
    for (tag, s) in [("below", cfg.threshold() - 0.2), ("above", cfg.threshold() + 0.2)] {
        let solver = cfg.solver(grid, vec![s])?;
        let runs: Vec<Result<(i64, f64, RunRecord)>> = cfg
            .packet_freqs
            .par_iter()
            .map(|&p| {
                let u0 = packet_datum(grid, p, s, amp)?;
                let n0 = sobolev_norm(&u0, s);
                Ok((p, n0, solve(&u0, &solver)?))
            })
            .collect();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for run in runs {
            let (p, n0, rec) = run?;
            let e = RatioEntry::new(format!("s {tag} threshold ({s:.3}), packet {p}"), rec.sup_sobolev(0), n0);
            if let Some(r) = e.ratio {
                xs.push((p as f64).log2());
                ys.push(r.log2());
            }
            rep.entries.push(e);
            rep.runs.push(RunSummary::of(format!("s = {s:.3}, packet {p}"), &rec));
        }
        rep.statistics.push((format!("growth_exponent_{tag}"), stats::linear_fit(&xs, &ys).slope));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        for k in ScenarioKind::ALL {
            assert_eq!(ScenarioKind::parse(k.id()).unwrap(), k);
        }
        assert!(ScenarioKind::parse("nope").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ScenarioConfig::new(ScenarioKind::Apriori);
        c.alpha = 1.5;
        assert!(c.validate().unwrap_err().to_string().contains("alpha must lie in (0,1)"));
        let mut c = ScenarioConfig::new(ScenarioKind::Apriori);
        c.s = 0.9;
        assert!(c.validate().unwrap_err().to_string().contains("3/2 - alpha"));
        let mut c = ScenarioConfig::new(ScenarioKind::Apriori);
        c.r = Some(1.0);
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new(ScenarioKind::BonaSmith);
        c.n_points = 256;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_datum_is_degenerate() {
        let mut c = ScenarioConfig::new(ScenarioKind::Apriori);
        c.amplitude = 0.0;
        c.data_count = 2;
        c.n_points = 32;
        let r = run_scenario(&c).unwrap();
        assert!(r.entries.iter().all(|e| e.ratio.is_none()));
        assert_eq!(r.pass, Some(true));
    }

    #[test]
    fn galilean_zero_shift_is_exact() {
        let mut c = ScenarioConfig::new(ScenarioKind::Galilean);
        c.c_values = vec![0.0];
        c.n_points = 64;
        c.horizon = 0.1;
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.entries[0].numerator, 0.0);
    }
}
