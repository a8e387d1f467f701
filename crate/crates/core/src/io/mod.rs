//! Configuration documents, run orchestration and file export.
//!
//! The functions here back the `dgbo` binary; they are public so that
//! programs embedding the library can drive the same pipelines.

pub mod config;
pub mod export;

pub use config::{parse_config, FullConfig, InitialKind, ScenarioSection, SolverSection, VerifierSection};
pub use export::{run_csv, table_csv, write_output, CsvTable, Envelope, Format};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::{scale_ladder, ratio_scan, BoundVariant, BoxGrid, RatioScan};
use crate::experiments::{packet_datum, random_smooth_datum};
use crate::resonance::{worst_constant, BoundCase, CaseKind, ConstantReport};
use crate::solver::{solve, RunRecord};
use crate::spectral::SpectralField;

/// Convolution-estimate cases accepted by `verify-estimates`, next to the
/// symbol cases of [`CaseKind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvolutionCase {
    Tri,
    Quad,
    TriImproved,
    QuadImproved,
}

impl ConvolutionCase {
    pub const ALL: [ConvolutionCase; 4] = [
        ConvolutionCase::Tri,
        ConvolutionCase::Quad,
        ConvolutionCase::TriImproved,
        ConvolutionCase::QuadImproved,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ConvolutionCase::Tri => "tri",
            ConvolutionCase::Quad => "quad",
            ConvolutionCase::TriImproved => "tri-improved",
            ConvolutionCase::QuadImproved => "quad-improved",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.id() == id)
            .ok_or_else(|| Error::config(format!("unknown convolution case '{id}'")))
    }

    pub fn arity(self) -> usize {
        match self {
            ConvolutionCase::Tri | ConvolutionCase::TriImproved => 3,
            ConvolutionCase::Quad | ConvolutionCase::QuadImproved => 4,
        }
    }

    pub fn variant(self) -> BoundVariant {
        match self {
            ConvolutionCase::Tri | ConvolutionCase::Quad => BoundVariant::Generic,
            _ => BoundVariant::Improved,
        }
    }
}

/// Initial datum described by the `solver` section.
pub fn initial_datum(cfg: &FullConfig) -> Result<SpectralField> {
    let s = &cfg.solver;
    let grid = cfg.grid()?;
    match s.initial {
        InitialKind::Cos => Ok(SpectralField::from_positive(grid, |xi| {
            if xi == 1 {
                (s.amplitude * std::f64::consts::PI).into()
            } else {
                0.0.into()
            }
        })),
        InitialKind::Random => random_smooth_datum(grid, s.s, s.amplitude, cfg.seed),
        InitialKind::Packet => packet_datum(grid, s.packet, s.s, s.amplitude),
    }
}

/// Solves the configured problem.
pub fn run_solve(cfg: &FullConfig) -> Result<RunRecord> {
    solve(&initial_datum(cfg)?, &cfg.solver_config()?)
}

/// Outcome of `verify-estimates`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verification {
    Symbol {
        report: ConstantReport,
        tolerance: f64,
        pass: bool,
    },
    Convolution {
        scan: RatioScan,
        tolerance: f64,
        pass: bool,
    },
}

impl Verification {
    pub fn pass(&self) -> bool {
        match self {
            Verification::Symbol { pass, .. } | Verification::Convolution { pass, .. } => *pass,
        }
    }
}

/// Runs the verifier case named by `cfg.verifier.case` up to dyadic scale
/// `cfg.verifier.k_max`.
pub fn run_verification(cfg: &FullConfig) -> Result<Verification> {
    let v = &cfg.verifier;
    let tol = v.trend_tolerance;
    if let Ok(kind) = CaseKind::parse(&v.case) {
        let case = BoundCase::new(kind, cfg.solver.alpha, v.k_max);
        let report = worst_constant(&case, &cfg.scan_options())?;
        let pass = report.max_ratio.is_finite() && report.trend_slope <= tol;
        return Ok(Verification::Symbol {
            report,
            tolerance: tol,
            pass,
        });
    }
    let case = ConvolutionCase::parse(&v.case)?;
    let k_cap = v.k_max.min(12);
    let grid = BoxGrid::new(cfg.dispersion()?).with_caps(12, k_cap);
    let ladder = scale_ladder(case.arity(), &grid);
    let from = (v.trend_min_scale as usize).saturating_sub(1).min(ladder.len().saturating_sub(2));
    let scan = ratio_scan(&grid, &ladder, case.variant(), v.draws, cfg.seed, from)?;
    let pass = scan.trend_slope <= tol && scan.per_config.iter().all(|c| c.max_ratio.is_finite());
    Ok(Verification::Convolution {
        scan,
        tolerance: tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_ids() {
        for c in ConvolutionCase::ALL {
            assert_eq!(ConvolutionCase::parse(c.id()).unwrap(), c);
        }
        assert!(ConvolutionCase::parse("penta").is_err());
        assert_eq!(ConvolutionCase::QuadImproved.arity(), 4);
    }

    #[test]
    fn cos_datum_has_unit_amplitude() {
        let cfg = FullConfig::default();
        let u = initial_datum(&cfg).unwrap();
        let phys = u.to_physical();
        assert!((phys[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_symbol_verification() {
        let mut cfg = FullConfig::default();
        cfg.verifier.case = "sigma1".into();
        cfg.verifier.k_max = 5;
        cfg.verifier.trend_min_scale = 3;
        let v = run_verification(&cfg).unwrap();
        assert!(matches!(v, Verification::Symbol { .. }));
    }
}
