//! JSON and CSV output.
//!
//! Every file carries the crate version, the bump-profile identifier, the
//! seed and the effective configuration. JSON floats are written in shortest
//! round-trip form, so parsing a file back reproduces every value bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dispersion::ConditionReport;
use crate::error::{Error, Result};
use crate::estimates::RatioScan;
use crate::experiments::ScenarioReport;
use crate::littlewood_paley::BUMP_ID;
use crate::resonance::ConstantReport;
use crate::solver::RunRecord;
use crate::VERSION;

use super::config::FullConfig;
use super::Verification;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::config(format!("unknown format '{other}', expected json or csv"))),
        }
    }
}

/// Metadata wrapper written around every payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub version: String,
    pub bump_profile: String,
    pub seed: u64,
    /// Effective configuration as a flat key-value document.
    pub config: String,
    pub payload: T,
}

impl<T> Envelope<T> {
    pub fn new(cfg: &FullConfig, payload: T) -> Self {
        Self {
            version: VERSION.to_string(),
            bump_profile: BUMP_ID.to_string(),
            seed: cfg.seed,
            config: cfg.to_text(),
            payload,
        }
    }

    fn csv_preamble(&self) -> String {
        let mut out = format!(
            "# version = {}\n# bump_profile = {}\n# seed = {}\n",
            self.version, self.bump_profile, self.seed
        );
        for line in self.config.lines() {
            out.push_str("# config: ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

impl<T: Serialize> Envelope<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

impl<T: for<'de> Deserialize<'de>> Envelope<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Tabular view of a report.
pub trait CsvTable {
    fn columns(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Header `t,mean,mass,hamiltonian,hs_norm[s=...]` plus one row per recorded
/// time, preceded by `#` metadata lines.
pub fn run_csv(env: &Envelope<&RunRecord>) -> String {
    let rec = env.payload;
    let mut out = env.csv_preamble();
    let mut header = vec!["t".to_string(), "mean".into(), "mass".into(), "hamiltonian".into()];
    header.extend(rec.config.sobolev_s.iter().map(|s| format!("hs_norm[s={s}]")));
    out.push_str(&header.join(","));
    out.push('\n');
    for d in &rec.diagnostics {
        let mut row = vec![num(d.t), num(d.mean), num(d.mass), num(d.hamiltonian)];
        row.extend(d.sobolev.iter().map(|v| num(*v)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Metadata lines, header and rows of any [`CsvTable`].
pub fn table_csv<T: CsvTable>(env: &Envelope<&T>) -> String {
    let mut out = env.csv_preamble();
    out.push_str(&env.payload.columns().join(","));
    out.push('\n');
    for row in env.payload.rows() {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes `bytes` to `path`, or to stdout when `path` is `None` or `-`.
pub fn write_output(path: Option<&Path>, bytes: &str) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, bytes).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        }),
        _ => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(bytes.as_bytes())?;
            Ok(())
        }
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl CsvTable for ConstantReport {
    fn columns(&self) -> Vec<String> {
        cols(&["scale", "max_ratio", "min_ratio", "evaluated", "total"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.per_scale
            .iter()
            .map(|s| {
                vec![
                    s.scale.to_string(),
                    num(s.max_ratio),
                    num(s.min_ratio),
                    s.evaluated.to_string(),
                    s.total.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvTable for RatioScan {
    fn columns(&self) -> Vec<String> {
        cols(&["ls", "ks", "max_ratio", "mean_ratio", "argmax_draw"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        self.per_config
            .iter()
            .map(|c| {
                vec![
                    join(&c.config.ls),
                    join(&c.config.ks),
                    num(c.max_ratio),
                    num(c.mean_ratio),
                    c.argmax_draw.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvTable for Verification {
    fn columns(&self) -> Vec<String> {
        match self {
            Verification::Symbol { report, .. } => report.columns(),
            Verification::Convolution { scan, .. } => scan.columns(),
        }
    }

    fn rows(&self) -> Vec<Vec<String>> {
        match self {
            Verification::Symbol { report, .. } => report.rows(),
            Verification::Convolution { scan, .. } => scan.rows(),
        }
    }
}

impl CsvTable for ScenarioReport {
    fn columns(&self) -> Vec<String> {
        cols(&["label", "numerator", "denominator", "ratio"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|e| {
                vec![
                    e.label.clone(),
                    num(e.numerator),
                    num(e.denominator),
                    e.ratio.map(num).unwrap_or_default(),
                ]
            })
            .collect();
        rows.extend(
            self.statistics
                .iter()
                .map(|(name, v)| vec![format!("stat:{name}"), num(*v), String::new(), String::new()]),
        );
        rows
    }
}

impl CsvTable for ConditionReport {
    fn columns(&self) -> Vec<String> {
        cols(&["xi_max", "window", "min", "max"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for w in [&self.base, &self.doubled] {
            for (name, r) in [
                ("first_derivative", &w.first_derivative),
                ("second_derivative", &w.second_derivative),
                ("resonance", &w.resonance),
            ] {
                rows.push(vec![w.xi_max.to_string(), name.into(), num(r.min), num(r.max)]);
            }
        }
        rows
    }
}
