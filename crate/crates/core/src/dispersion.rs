//! Dispersion relations and the admissibility checks for the generalized
//! equation `∂t u - L_{iω} u = ∂x(u²)`.
//!
//! The linear flow is `û(t, ξ) = e^{iω(ξ)t} û(0, ξ)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

type OmegaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied odd multiplier together with the exponent `α` and the
/// threshold `κ` above which its derivative bounds are claimed.
#[derive(Clone)]
pub struct CustomDispersion {
    label: String,
    omega: OmegaFn,
    alpha: f64,
    kappa: f64,
    note: Option<String>,
}

impl fmt::Debug for CustomDispersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDispersion")
            .field("label", &self.label)
            .field("alpha", &self.alpha)
            .field("kappa", &self.kappa)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum DispersionSpec {
    /// `ω(ξ) = -ξ|ξ|^α`.
    FractionalBO { alpha: f64 },
    Custom(CustomDispersion),
}

/// Plain-data description of a [`DispersionSpec`] for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionInfo {
    pub label: String,
    pub alpha: f64,
    pub kappa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DispersionSpec {
    /// Fractional family; accepts `α ∈ (0, 2]`.
    pub fn fractional(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::config(format!(
                "fractional dispersion needs alpha in (0,2], got {alpha}"
            )));
        }
        Ok(DispersionSpec::FractionalBO { alpha })
    }

    /// Wraps an arbitrary multiplier. The function is probed for oddness and
    /// finiteness on a sample of frequencies.
    pub fn custom<F>(label: impl Into<String>, omega: F, alpha: f64, kappa: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::config("kappa must be positive"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::config("alpha must be positive"));
        }
        let spec = DispersionSpec::Custom(CustomDispersion {
            label: label.into(),
            omega: Arc::new(omega),
            alpha,
            kappa,
            note: None,
        });
        spec.validate()?;
        Ok(spec)
    }

    /// Capillary Whitham multiplier
    /// `ω(ξ) = sgn(ξ) √(tanh|ξ| · |ξ|(1 + τξ²))`, effective `α = 1/2`.
    ///
    /// The tanh-based formula is even in `ξ`; the `sgn` factor makes it odd.
    pub fn whitham_capillary(tau: f64, kappa: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::config("tau must be positive"));
        }
        let mut spec = Self::custom(
            format!("whitham-capillary(tau={tau})"),
            move |xi: f64| {
                let a = xi.abs();
                xi.signum() * (a.tanh() * a * (1.0 + tau * a * a)).sqrt()
            },
            0.5,
            kappa,
        )?;
        if let DispersionSpec::Custom(c) = &mut spec {
            c.note = Some("odd extension sgn(xi)*sqrt(tanh|xi| |xi| (1+tau xi^2))".into());
        }
        Ok(spec)
    }

    pub fn omega(&self, xi: f64) -> f64 {
        match self {
            DispersionSpec::FractionalBO { alpha } => -xi * xi.abs().powf(*alpha),
            DispersionSpec::Custom(c) => (c.omega)(xi),
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            DispersionSpec::FractionalBO { alpha } => *alpha,
            DispersionSpec::Custom(c) => c.alpha,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            DispersionSpec::FractionalBO { .. } => 1.0,
            DispersionSpec::Custom(c) => c.kappa,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DispersionSpec::FractionalBO { alpha } => format!("fractional(alpha={alpha})"),
            DispersionSpec::Custom(c) => c.label.clone(),
        }
    }

    pub fn info(&self) -> DispersionInfo {
        DispersionInfo {
            label: self.label(),
            alpha: self.alpha(),
            kappa: self.kappa(),
            note: match self {
                DispersionSpec::FractionalBO { .. } => None,
                DispersionSpec::Custom(c) => c.note.clone(),
            },
        }
    }

    /// Largest `|ω(ξ) + ω(-ξ)|` over the probe set, scaled by `max(1, |ω(ξ)|)`.
    pub fn oddness_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for xi in probe_points() {
            let a = self.omega(xi);
            let b = self.omega(-xi);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::numeric(format!("omega is not finite at {xi}")));
            }
            worst = worst.max((a + b).abs() / a.abs().max(1.0));
        }
        Ok(worst)
    }

    fn validate(&self) -> Result<()> {
        let defect = self.oddness_defect()?;
        if defect > 1e-12 {
            return Err(Error::Admissibility(format!(
                "omega must be odd; |omega(xi) + omega(-xi)| reaches {defect:.3e}"
            )));
        }
        Ok(())
    }

    /// Evaluates `ω` on all integers in `[-m, m]`; index `ξ + m`.
    pub fn table(&self, m: i64) -> Result<Vec<f64>> {
        let t: Vec<f64> = (-m..=m).map(|xi| self.omega(xi as f64)).collect();
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("omega is not finite on the integer table"));
        }
        Ok(t)
    }
}

fn probe_points() -> impl Iterator<Item = f64> {
    (0..=64)
        .map(|i| i as f64)
        .chain((0..40).map(|i| 0.37 + 1.71 * i as f64))
        .chain((7..14).map(|p| (p as f64).exp2()))
}

/// Closed `[min, max]` window of a ratio over a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioWindow {
    pub min: f64,
    pub max: f64,
}

impl RatioWindow {
    fn empty() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    fn merge(self, o: Self) -> Self {
        Self {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.min > 0.0 && self.max.is_finite() && self.min <= self.max
    }

    /// Largest relative endpoint movement from `self` to `other`.
    pub fn relative_shift(&self, other: &RatioWindow) -> f64 {
        let a = (other.min - self.min).abs() / self.min.abs();
        let b = (other.max - self.max).abs() / self.max.abs();
        a.max(b)
    }
}

/// Ratio windows at one scan size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionWindows {
    pub xi_max: i64,
    /// `|ω'(ξ)| / |ξ|^α` over integers `κ < |ξ| <= xi_max`.
    pub first_derivative: RatioWindow,
    /// `|ω''(ξ)| / |ξ|^{α-1}` over the same range.
    pub second_derivative: RatioWindow,
    /// `|Ω| / (|ξ1*|^α |ξ3*|)` over nonzero zero-sum triples with `|ξ1*| > κ`.
    pub resonance: RatioWindow,
    pub triples_scanned: u64,
}

/// Output of [`check_conditions`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub dispersion: DispersionInfo,
    pub alpha: f64,
    pub kappa: f64,
    pub base: ConditionWindows,
    pub doubled: ConditionWindows,
    /// Largest relative endpoint shift per window, in the order
    /// first derivative, second derivative, resonance.
    pub stability: [f64; 3],
    pub stability_tolerance: f64,
    /// Least-squares slope of `log|ω'|` against `log|ξ|` over the top octave.
    pub effective_alpha: f64,
    pub scan_size: u64,
    pub pass: bool,
}

const FD_STEP: f64 = 1e-3;

/// First derivative by central differences with one Richardson step.
pub fn derivative(spec: &DispersionSpec, xi: f64) -> f64 {
    let d = |h: f64| (spec.omega(xi + h) - spec.omega(xi - h)) / (2.0 * h);
    (4.0 * d(FD_STEP / 2.0) - d(FD_STEP)) / 3.0
}

/// Second derivative by central differences with one Richardson step.
pub fn second_derivative(spec: &DispersionSpec, xi: f64) -> f64 {
    let w0 = spec.omega(xi);
    let d = |h: f64| (spec.omega(xi + h) - 2.0 * w0 + spec.omega(xi - h)) / (h * h);
    (4.0 * d(FD_STEP / 2.0) - d(FD_STEP)) / 3.0
}

/// Scans the three ratio windows for `κ < |ξ| <= xi_max`.
pub fn condition_windows(spec: &DispersionSpec, xi_max: i64) -> Result<ConditionWindows> {
    let alpha = spec.alpha();
    let kappa = spec.kappa();
    let mut first = RatioWindow::empty();
    let mut second = RatioWindow::empty();
    for m in 1..=xi_max {
        if (m as f64) <= kappa {
            continue;
        }
        for xi in [m as f64, -(m as f64)] {
            let d1 = derivative(spec, xi);
            let d2 = second_derivative(spec, xi);
            if !d1.is_finite() || !d2.is_finite() {
                return Err(Error::numeric(format!("derivative not finite at {xi}")));
            }
            let a = xi.abs();
            first.push(d1.abs() / a.powf(alpha));
            second.push(d2.abs() / a.powf(alpha - 1.0));
        }
    }
    if !first.min.is_finite() {
        return Err(Error::domain("no integer frequency above kappa in range"));
    }
    let table = spec.table(xi_max)?;
    let (resonance, triples) = resonance_window_from_table(&table, xi_max, alpha, kappa);
    Ok(ConditionWindows {
        xi_max,
        first_derivative: first,
        second_derivative: second,
        resonance,
        triples_scanned: triples,
    })
}

/// Exhaustive `|Ω| / (|ξ1*|^α |ξ3*|)` window over nonzero zero-sum integer
/// triples with `|ξi| <= m` and `|ξ1*| > κ`. `table[ξ + m] = ω(ξ)`.
pub(crate) fn resonance_window_from_table(
    table: &[f64],
    m: i64,
    alpha: f64,
    kappa: f64,
) -> (RatioWindow, u64) {
    use rayon::prelude::*;
    let pow: Vec<f64> = (0..=m).map(|v| (v as f64).powf(alpha)).collect();
    let w = |xi: i64| table[(xi + m) as usize];
    // By oddness Ω(-ξ) = -Ω(ξ), so ξ1 > 0 suffices.
    let (window, count) = (1..=m)
        .into_par_iter()
        .map(|x1| {
            let mut win = RatioWindow::empty();
            let mut count = 0u64;
            for x2 in -m..=m {
                let x3 = -x1 - x2;
                if x2 == 0 || x3 == 0 || x3.abs() > m {
                    continue;
                }
                let mut a = [x1.abs(), x2.abs(), x3.abs()];
                a.sort_unstable();
                if (a[2] as f64) <= kappa {
                    continue;
                }
                let omega = w(x1) + w(x2) + w(x3);
                win.push(omega.abs() / (pow[a[2] as usize] * a[0] as f64));
                count += 1;
            }
            (win, count)
        })
        .reduce(
            || (RatioWindow::empty(), 0),
            |(a, n), (b, m)| (a.merge(b), n + m),
        );
    (window, 2 * count)
}

/// Checks the derivative and resonance conditions on `κ < |ξ| <= xi_max`
/// and again on a doubled range.
pub fn check_conditions(spec: &DispersionSpec, xi_max: i64) -> Result<ConditionReport> {
    spec.validate()?;
    let kappa = spec.kappa();
    if (xi_max as f64) < 4.0 * kappa {
        return Err(Error::domain(format!(
            "xi_max = {xi_max} must be at least 4 kappa = {}",
            4.0 * kappa
        )));
    }
    let base = condition_windows(spec, xi_max)?;
    let doubled = condition_windows(spec, 2 * xi_max)?;
    let stability = [
        base.first_derivative.relative_shift(&doubled.first_derivative),
        base.second_derivative.relative_shift(&doubled.second_derivative),
        base.resonance.relative_shift(&doubled.resonance),
    ];
    let tol = 0.1;
    let windows_ok = [&base, &doubled].iter().all(|w| {
        w.first_derivative.is_nondegenerate()
            && w.second_derivative.is_nondegenerate()
            && w.resonance.is_nondegenerate()
    });
    let pass = windows_ok && stability.iter().all(|s| *s <= tol);

    let lo = (xi_max / 2).max(kappa.ceil() as i64 + 1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=xi_max)
        .map(|m| ((m as f64).ln(), derivative(spec, m as f64).abs().ln()))
        .unzip();
    let effective_alpha = stats::linear_fit(&xs, &ys).slope;

    let scan_size = base.triples_scanned
        + doubled.triples_scanned
        + 4 * (base.xi_max + doubled.xi_max) as u64;
    Ok(ConditionReport {
        dispersion: spec.info(),
        alpha: spec.alpha(),
        kappa,
        base,
        doubled,
        stability,
        stability_tolerance: tol,
        effective_alpha,
        scan_size,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_examples() {
        let bo1 = DispersionSpec::fractional(1.0).unwrap();
        assert_eq!(bo1.omega(2.0), -4.0);
        let bo = DispersionSpec::fractional(0.5).unwrap();
        assert_eq!(bo.omega(4.0), -8.0);
        for a in [0.1, 0.5, 0.9] {
            assert_eq!(DispersionSpec::fractional(a).unwrap().omega(0.0), 0.0);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(DispersionSpec::fractional(0.0).is_err());
        assert!(DispersionSpec::fractional(-1.0).is_err());
        assert!(DispersionSpec::fractional(f64::NAN).is_err());
    }

    #[test]
    fn even_multiplier_rejected() {
        let r = DispersionSpec::custom("square", |x| x * x, 1.0, 1.0);
        assert!(matches!(r, Err(Error::Admissibility(_))));
    }

    #[test]
    fn non_finite_multiplier_rejected() {
        let r = DispersionSpec::custom("bad", |x| 1.0 / (x - 3.0) - 1.0 / (-x - 3.0), 1.0, 1.0);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn alpha_one_first_derivative_window() {
        let spec = DispersionSpec::fractional(1.0).unwrap();
        let w = condition_windows(&spec, 64).unwrap();
        assert!((w.first_derivative.min - 2.0).abs() < 1e-8);
        assert!((w.first_derivative.max - 2.0).abs() < 1e-8);
    }

    #[test]
    fn fractional_family_passes() {
        for a in [0.25, 0.5, 0.75] {
            let spec = DispersionSpec::fractional(a).unwrap();
            let r = check_conditions(&spec, 128).unwrap();
            assert!(r.pass, "alpha {a}: {r:?}");
            let w = r.base.first_derivative;
            assert!((w.min - (1.0 + a)).abs() < 1e-6 && (w.max - (1.0 + a)).abs() < 1e-6);
            assert!((r.effective_alpha - a).abs() < 1e-6);
        }
    }

    #[test]
    fn small_xi_max_rejected() {
        let spec = DispersionSpec::whitham_capillary(1.0, 10.0).unwrap();
        assert!(matches!(check_conditions(&spec, 30), Err(Error::Domain(_))));
    }

    #[test]
    fn whitham_is_odd() {
        let spec = DispersionSpec::whitham_capillary(1.0, 10.0).unwrap();
        assert!(spec.oddness_defect().unwrap() <= 1e-12);
        assert!(spec.omega(5.0) > 0.0);
        assert!(spec.info().note.is_some());
    }
}
