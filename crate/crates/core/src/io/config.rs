//! Flat `section.key = value` configuration documents.
//!
//! The format is the dotted-key subset of TOML, so documents are parsed with
//! the `toml` crate. Every key has a default; an empty document is a complete
//! configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ScenarioConfig, ScenarioKind};
use crate::resonance::{CaseKind, ScanOptions};
use crate::solver::{DtPolicy, Integrator, SolverConfig};
use crate::spectral::TorusGrid;
use crate::DispersionSpec;

/// Initial datum used by `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `amplitude · cos x`.
    Cos,
    /// Seeded random datum with `‖u0‖_{H^s} = amplitude`.
    Random,
    /// `cos x + cos(packet x)` with `‖u0‖_{H^s} = amplitude`.
    Packet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub alpha: f64,
    pub n_points: usize,
    pub dt: f64,
    pub dt_policy: DtPolicy,
    pub horizon: f64,
    pub integrator: Integrator,
    pub record_every: usize,
    /// Sobolev index tracked in diagnostics and used by the scenarios.
    pub s: f64,
    pub nonlinear: bool,
    pub initial: InitialKind,
    pub amplitude: f64,
    pub packet: i64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            n_points: 256,
            dt: 1e-3,
            dt_policy: DtPolicy::NonlinearCfl,
            horizon: 0.5,
            integrator: Integrator::Etdrk4,
            record_every: 10,
            s: 1.1,
            nonlinear: true,
            initial: InitialKind::Cos,
            amplitude: 1.0,
            packet: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    pub r: Option<f64>,
    pub data_count: usize,
    pub ratio_cap: f64,
    pub delta: f64,
    pub n_grid: Vec<u32>,
    pub lambdas: Vec<u32>,
    pub c_values: Vec<f64>,
    pub tolerance: f64,
    pub packet_freqs: Vec<i64>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let d = ScenarioConfig::new(ScenarioKind::Apriori);
        Self {
            kind: d.kind,
            r: d.r,
            data_count: d.data_count,
            ratio_cap: d.ratio_cap,
            delta: d.delta,
            n_grid: d.n_grid,
            lambdas: d.lambdas,
            c_values: d.c_values,
            tolerance: d.tolerance,
            packet_freqs: d.packet_freqs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifierSection {
    pub case: String,
    pub k_max: u32,
    pub budget: u64,
    pub allow_subsample: bool,
    pub trend_min_scale: u32,
    pub draws: usize,
    pub trend_tolerance: f64,
}

impl Default for VerifierSection {
    fn default() -> Self {
        let o = ScanOptions::default();
        Self {
            case: "sigma1".into(),
            k_max: 9,
            budget: o.budget,
            allow_subsample: o.allow_subsample,
            trend_min_scale: o.trend_min_scale,
            draws: 200,
            trend_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FullConfig {
    /// Top-level seed; every random stream is derived from it.
    pub seed: u64,
    pub solver: SolverSection,
    pub scenario: ScenarioSection,
    pub verifier: VerifierSection,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<FullConfig> {
    let cfg: FullConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_f64(x: f64) -> String {
    // Debug gives the shortest representation that parses back exactly
    format!("{x:?}")
}

fn fmt_list<T, F: Fn(&T) -> String>(v: &[T], f: F) -> String {
    let items: Vec<String> = v.iter().map(f).collect();
    format!("[{}]", items.join(", "))
}

fn enum_id<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

impl FullConfig {
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return Err(Error::config("alpha must lie in (0,1)"));
        }
        TorusGrid::new(s.n_points)?;
        if !(s.dt > 0.0) || !(s.horizon >= 0.0) || !s.dt.is_finite() || !s.horizon.is_finite() {
            return Err(Error::config("solver.dt must be positive and solver.horizon nonnegative"));
        }
        if !(s.amplitude >= 0.0) {
            return Err(Error::config("solver.amplitude must be nonnegative"));
        }
        CaseKind::parse(&self.verifier.case).or_else(|_| {
            crate::io::ConvolutionCase::parse(&self.verifier.case).map(|_| CaseKind::NuSymbol)
        })?;
        self.scenario_config(self.scenario.kind).validate()
    }

    pub fn dispersion(&self) -> Result<DispersionSpec> {
        DispersionSpec::fractional(self.solver.alpha)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.solver.n_points)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(self.dispersion()?, self.grid()?)
            .with_dt(s.dt, s.dt_policy)
            .with_horizon(s.horizon)
            .with_integrator(s.integrator)
            .with_record_every(s.record_every)
            .with_sobolev(vec![s.s]);
        if !s.nonlinear {
            cfg = cfg.linear_only();
        }
        Ok(cfg)
    }

    /// Scenario configuration of the given kind built from this document.
    pub fn scenario_config(&self, kind: ScenarioKind) -> ScenarioConfig {
        let (s, sc) = (&self.solver, &self.scenario);
        let mut c = ScenarioConfig::new(kind);
        c.alpha = s.alpha;
        c.s = s.s;
        c.r = sc.r;
        if kind != ScenarioKind::BonaSmith || s.n_points >= c.n_points {
            c.n_points = s.n_points;
        }
        c.horizon = s.horizon;
        c.dt = s.dt;
        c.integrator = s.integrator;
        c.seed = self.seed;
        c.data_count = sc.data_count;
        c.amplitude = s.amplitude;
        c.ratio_cap = sc.ratio_cap;
        c.delta = sc.delta;
        c.n_grid = sc.n_grid.clone();
        c.lambdas = sc.lambdas.clone();
        c.c_values = sc.c_values.clone();
        c.tolerance = sc.tolerance;
        c.packet_freqs = sc.packet_freqs.clone();
        c
    }

    pub fn scan_options(&self) -> ScanOptions {
        let v = &self.verifier;
        ScanOptions {
            budget: v.budget,
            seed: self.seed,
            allow_subsample: v.allow_subsample,
            trend_min_scale: v.trend_min_scale,
        }
    }

    /// Flat `section.key = value` text; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let s = &self.solver;
        let sc = &self.scenario;
        let v = &self.verifier;
        let mut lines = vec![format!("seed = {}", self.seed)];
        let mut put = |k: &str, val: String| lines.push(format!("{k} = {val}"));
        put("solver.alpha", fmt_f64(s.alpha));
        put("solver.n_points", s.n_points.to_string());
        put("solver.dt", fmt_f64(s.dt));
        put("solver.dt_policy", quote(&enum_id(&s.dt_policy)));
        put("solver.horizon", fmt_f64(s.horizon));
        put("solver.integrator", quote(&enum_id(&s.integrator)));
        put("solver.record_every", s.record_every.to_string());
        put("solver.s", fmt_f64(s.s));
        put("solver.nonlinear", s.nonlinear.to_string());
        put("solver.initial", quote(&enum_id(&s.initial)));
        put("solver.amplitude", fmt_f64(s.amplitude));
        put("solver.packet", s.packet.to_string());
        put("scenario.kind", quote(sc.kind.id()));
        if let Some(r) = sc.r {
            put("scenario.r", fmt_f64(r));
        }
        put("scenario.data_count", sc.data_count.to_string());
        put("scenario.ratio_cap", fmt_f64(sc.ratio_cap));
        put("scenario.delta", fmt_f64(sc.delta));
        put("scenario.n_grid", fmt_list(&sc.n_grid, |x| x.to_string()));
        put("scenario.lambdas", fmt_list(&sc.lambdas, |x| x.to_string()));
        put("scenario.c_values", fmt_list(&sc.c_values, |x| fmt_f64(*x)));
        put("scenario.tolerance", fmt_f64(sc.tolerance));
        put("scenario.packet_freqs", fmt_list(&sc.packet_freqs, |x| x.to_string()));
        put("verifier.case", quote(&v.case));
        put("verifier.k_max", v.k_max.to_string());
        put("verifier.budget", v.budget.to_string());
        put("verifier.allow_subsample", v.allow_subsample.to_string());
        put("verifier.trend_min_scale", v.trend_min_scale.to_string());
        put("verifier.draws", v.draws.to_string());
        put("verifier.trend_tolerance", fmt_f64(v.trend_tolerance));
        lines.join("\n") + "\n"
    }
}
