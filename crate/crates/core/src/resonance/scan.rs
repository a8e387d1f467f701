//! Brute-force verification of dyadic symbol bounds.
//!
//! A [`BoundCase`] names a symbol family and a range of leading dyadic
//! scales. [`worst_constant`] enumerates every admissible assignment of the
//! remaining scales (with `k ∼ j` meaning `|k - j| < 3` and `k ≫ j` meaning
//! `k - j >= 3`), then every frequency tuple in the corresponding supports,
//! and reports the largest observed ratio between the symbol and its
//! majorant. Assignments whose tuple count exceeds their share of the budget
//! are subsampled uniformly with a seeded generator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::symbols::{self, FourScales};
use super::{inv_resonance_gap, resonance_frac};
use crate::error::{Error, Result};
use crate::littlewood_paley::{chi_k, chi_k_positive_support};
use crate::stats;

/// Symbol family under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family", content = "index")]
pub enum CaseKind {
    /// `|Ω| / (|ξ1*|^α |ξ3*|)`; reported as a two-sided window.
    ResonanceAsymptotic,
    /// `|1/Ω(ξa, ξ2b, ξ3) - 1/Ω(ξab, ξ2, ξ3)|` against
    /// `2^{-k2(1+α)} 2^{-k3} 2^{kb}`.
    InvResonanceDiff,
    /// `|σ_j|` against `2^{k3}`, `j ∈ 1..=3`.
    SigmaJ(u8),
    /// `|m_j|` against `2^{max(k3,kb)} 2^{-k2 α}`, `j ∈ 1..=5`.
    MFamily(u8),
    /// `|A_i|` against `2^{-k2 α} 2^{max(k3,kb)}`, `i ∈ 1..=3`.
    AFamily(u8),
    /// `|A'_i|` against `2^{-k2 α} 2^{max(k3,ka)}`, `i ∈ 1..=3`.
    APrimeFamily(u8),
    /// `|ν|` against `2^{k3}`.
    NuSymbol,
}

impl CaseKind {
    pub fn id(&self) -> String {
        match self {
            CaseKind::ResonanceAsymptotic => "resonance".into(),
            CaseKind::InvResonanceDiff => "inv-resonance".into(),
            CaseKind::SigmaJ(j) => format!("sigma{j}"),
            CaseKind::MFamily(j) => format!("m{j}"),
            CaseKind::AFamily(i) => format!("a{i}"),
            CaseKind::APrimeFamily(i) => format!("aprime{i}"),
            CaseKind::NuSymbol => "nu".into(),
        }
    }

    /// Parses identifiers such as `sigma2`, `m5`, `aprime1`, `inv-resonance`.
    pub fn parse(id: &str) -> Result<Self> {
        let bad = || Error::config(format!("unknown bound case '{id}'"));
        let idx = |rest: &str, max: u8| -> Result<u8> {
            let j: u8 = rest.parse().map_err(|_| bad())?;
            if (1..=max).contains(&j) {
                Ok(j)
            } else {
                Err(bad())
            }
        };
        match id {
            "resonance" => Ok(CaseKind::ResonanceAsymptotic),
            "inv-resonance" => Ok(CaseKind::InvResonanceDiff),
            "nu" => Ok(CaseKind::NuSymbol),
            _ => {
                if let Some(r) = id.strip_prefix("sigma") {
                    Ok(CaseKind::SigmaJ(idx(r, 3)?))
                } else if let Some(r) = id.strip_prefix("aprime") {
                    Ok(CaseKind::APrimeFamily(idx(r, 3)?))
                } else if let Some(r) = id.strip_prefix('m') {
                    Ok(CaseKind::MFamily(idx(r, 5)?))
                } else if let Some(r) = id.strip_prefix('a') {
                    Ok(CaseKind::AFamily(idx(r, 3)?))
                } else {
                    Err(bad())
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            CaseKind::SigmaJ(j) | CaseKind::AFamily(j) | CaseKind::APrimeFamily(j) => {
                (1..=3).contains(j)
            }
            CaseKind::MFamily(j) => (1..=5).contains(j),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid family index in {self:?}")))
        }
    }
}

/// A family plus the range of leading scales to scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCase {
    pub kind: CaseKind,
    pub alpha: f64,
    /// Smallest leading scale scanned.
    pub k_min: u32,
    /// Cap on every dyadic label (for [`CaseKind::ResonanceAsymptotic`] the
    /// frequency box is `|ξi| <= 2^{k_max}`).
    pub k_max: u32,
}

impl BoundCase {
    pub fn new(kind: CaseKind, alpha: f64, k_max: u32) -> Self {
        Self {
            kind,
            alpha,
            k_min: 0,
            k_max,
        }
    }
}

/// Dyadic labels of one assignment; unused slots are zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scales {
    pub k1: u32,
    pub k2: u32,
    pub k3: u32,
    pub ka: u32,
    pub kb: u32,
}

impl Scales {
    fn four(&self) -> FourScales {
        FourScales {
            k1: self.k1,
            ka: self.ka,
            kb: self.kb,
            k2: self.k2,
            k3: self.k3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Total number of tuple evaluations.
    pub budget: u64,
    pub seed: u64,
    /// If false, exceeding the budget is a resource error.
    pub allow_subsample: bool,
    /// Smallest leading scale included in the trend regression. Below
    /// scale 7 the integer lattice under-resolves the cutoff transition
    /// layers and the maxima are still climbing toward their continuum
    /// values.
    pub trend_min_scale: u32,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            budget: 10_000_000,
            seed: 0x5eed,
            allow_subsample: true,
            trend_min_scale: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleStat {
    pub scale: u32,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub evaluated: u64,
    pub total: u64,
}

/// Tuple attaining the maximal ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub scales: Scales,
    pub xi: Vec<i64>,
    pub value: f64,
    pub majorant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub case: String,
    pub alpha: f64,
    pub max_ratio: f64,
    /// Smallest positive ratio seen (the lower window end for the resonance
    /// case).
    pub min_ratio: f64,
    pub argmax: Option<Witness>,
    pub per_scale: Vec<ScaleStat>,
    /// Relative change of the per-scale maximum between the two largest
    /// scanned scales.
    pub stability_delta: f64,
    /// Least-squares slope of `ln(max ratio)` against the scale index.
    pub trend_slope: f64,
    pub trend_min_scale: u32,
    pub assignments: usize,
    pub tuples_evaluated: u64,
    pub tuples_total: u64,
    pub subsampled: bool,
    pub seed: u64,
    pub budget: u64,
}

fn signed_support(k: u32) -> Vec<i64> {
    let r = chi_k_positive_support(k);
    let mut v: Vec<i64> = r.clone().map(|x| -x).rev().collect();
    v.extend(r);
    v
}

fn union_support(a: u32, b: u32) -> Vec<i64> {
    let mut v = signed_support(a);
    v.extend(signed_support(b));
    v.sort_unstable();
    v.dedup();
    v
}

fn sim(a: u32, b: u32) -> bool {
    (a as i64 - b as i64).abs() < 3
}

fn much_less(low: u32, high: u32) -> bool {
    high >= low + 3
}

/// All admissible scale assignments with their leading scale.
pub fn enumerate_scales(case: &BoundCase) -> Vec<(u32, Scales)> {
    let kmax = case.k_max;
    let mut out = Vec::new();
    let r = 0..=kmax;
    match case.kind {
        CaseKind::ResonanceAsymptotic => {}
        CaseKind::SigmaJ(_) => {
            for k1 in r.clone() {
                for k2 in r.clone().filter(|&k2| sim(k1, k2)) {
                    for k3 in r.clone().filter(|&k3| much_less(k3, k1) && much_less(k3, k2)) {
                        out.push((k1, Scales { k1, k2, k3, ..Default::default() }));
                    }
                }
            }
        }
        CaseKind::NuSymbol => {
            for k1 in r.clone() {
                for k3 in r.clone().filter(|&k3| much_less(k3, k1)) {
                    out.push((k1, Scales { k1, k3, ..Default::default() }));
                }
            }
        }
        CaseKind::InvResonanceDiff => {
            for k2 in r.clone() {
                for ka in r.clone().filter(|&ka| sim(ka, k2)) {
                    for k3 in r.clone().filter(|&k3| much_less(k3, ka) && much_less(k3, k2)) {
                        for kb in r.clone().filter(|&kb| kb < k2 + 3) {
                            out.push((k2, Scales { k1: k2, k2, k3, ka, kb }));
                        }
                    }
                }
            }
        }
        CaseKind::MFamily(_) => {
            for k2 in r.clone() {
                for ka in r.clone().filter(|&ka| sim(ka, k2)) {
                    for k1 in r.clone().filter(|&k1| sim(k1, k2)) {
                        for kb in r.clone().filter(|&kb| much_less(kb, ka) && much_less(kb, k2)) {
                            for k3 in r.clone().filter(|&k3| much_less(k3, k1)) {
                                out.push((k2, Scales { k1, k2, k3, ka, kb }));
                            }
                        }
                    }
                }
            }
        }
        CaseKind::AFamily(_) => {
            for k2 in r.clone() {
                for k1 in r.clone().filter(|&k1| sim(k1, k2)) {
                    for ka in r.clone().filter(|&ka| sim(ka, k2) && sim(ka, k1)) {
                        for k3 in r.clone().filter(|&k3| much_less(k3, k1)) {
                            for kb in r.clone().filter(|&kb| kb < k2 + 3) {
                                out.push((k2, Scales { k1, k2, k3, ka, kb }));
                            }
                        }
                    }
                }
            }
        }
        CaseKind::APrimeFamily(_) => {
            for k2 in r.clone() {
                for k1 in r.clone().filter(|&k1| sim(k1, k2)) {
                    for kb in r.clone().filter(|&kb| sim(kb, k2) && sim(kb, k1)) {
                        for k3 in r.clone().filter(|&k3| much_less(k3, k1)) {
                            for ka in r.clone().filter(|&ka| ka < k2 + 3) {
                                out.push((k2, Scales { k1, k2, k3, ka, kb }));
                            }
                        }
                    }
                }
            }
        }
    }
    out.retain(|(lead, _)| *lead >= case.k_min);
    out
}

fn majorant(case: &BoundCase, s: &Scales) -> f64 {
    let a = case.alpha;
    let p = |e: f64| e.exp2();
    match case.kind {
        CaseKind::ResonanceAsymptotic => 1.0,
        CaseKind::InvResonanceDiff => {
            p(-(s.k2 as f64) * (1.0 + a) - s.k3 as f64 + s.kb as f64)
        }
        CaseKind::SigmaJ(_) | CaseKind::NuSymbol => p(s.k3 as f64),
        CaseKind::MFamily(_) | CaseKind::AFamily(_) => {
            p(s.k3.max(s.kb) as f64 - a * s.k2 as f64)
        }
        CaseKind::APrimeFamily(_) => p(s.k3.max(s.ka) as f64 - a * s.k2 as f64),
    }
}

/// Free frequency sets for an assignment; the last frequency is fixed by
/// the zero-sum constraint.
fn free_sets(kind: CaseKind, s: &Scales) -> Vec<Vec<i64>> {
    match kind {
        CaseKind::ResonanceAsymptotic => Vec::new(),
        // (ξ3, ξ2), ξ1 = -ξ2 - ξ3
        CaseKind::SigmaJ(_) => vec![signed_support(s.k3), union_support(s.k1, s.k2)],
        // (ξ3, ξ1), ξ2 = -ξ1 - ξ3
        CaseKind::NuSymbol => vec![signed_support(s.k3), signed_support(s.k1)],
        // (ξ3, ξb, ξa), ξ2 = -(ξa + ξb + ξ3)
        CaseKind::InvResonanceDiff | CaseKind::AFamily(_) | CaseKind::APrimeFamily(_) => vec![
            signed_support(s.k3),
            signed_support(s.kb),
            signed_support(s.ka),
        ],
        CaseKind::MFamily(_) => vec![
            signed_support(s.k3),
            signed_support(s.kb),
            union_support(s.ka, s.k2),
        ],
    }
}

/// Evaluates the symbol magnitude on one free tuple. `Ok(None)` marks a
/// tuple outside the admissible set.
fn eval_free(case: &BoundCase, s: &Scales, free: &[i64]) -> Result<Option<(f64, Vec<i64>)>> {
    let a = case.alpha;
    match case.kind {
        CaseKind::SigmaJ(j) => {
            let (x3, x2) = (free[0], free[1]);
            let x1 = -x2 - x3;
            let v = symbols::sigma_j(j, [s.k1, s.k2, s.k3], [x1, x2, x3])?;
            Ok(Some((v.norm(), vec![x1, x2, x3])))
        }
        CaseKind::NuSymbol => {
            let (x3, x1) = (free[0], free[1]);
            let x2 = -x1 - x3;
            Ok(Some((symbols::nu(s.k1, s.k3, [x1, x2, x3]).abs(), vec![x1, x2, x3])))
        }
        CaseKind::InvResonanceDiff | CaseKind::AFamily(_) | CaseKind::APrimeFamily(_) => {
            let (x3, xb, xa) = (free[0], free[1], free[2]);
            let x2 = -(xa + xb + x3);
            if chi_k(s.k2, x2 as f64) <= 0.0 {
                return Ok(None);
            }
            let xi = [xa, xb, x2, x3];
            let v = match case.kind {
                CaseKind::InvResonanceDiff => inv_resonance_gap(a, xa, xb, x2, x3)?,
                CaseKind::AFamily(i) => symbols::a_family(i, a, s.k1, s.k3, xi)?.abs(),
                CaseKind::APrimeFamily(i) => {
                    symbols::a_prime_family(i, a, s.k1, s.k3, xi)?.abs()
                }
                _ => unreachable!(),
            };
            Ok(Some((v, xi.to_vec())))
        }
        CaseKind::MFamily(j) => {
            let (x3, xb, xa) = (free[0], free[1], free[2]);
            let x2 = -(xa + xb + x3);
            let xi = [xa, xb, x2, x3];
            let v = symbols::m_family(j, a, s.four(), xi)?;
            Ok(Some((v.norm(), xi.to_vec())))
        }
        CaseKind::ResonanceAsymptotic => Ok(None),
    }
}

/// Evaluates a family at explicit scales and frequencies. Frequencies are
/// `[ξ1, ξ2, ξ3]` for the three-frequency families and `[ξa, ξb, ξ2, ξ3]`
/// otherwise; they must sum to zero.
pub fn symbol_eval(case: &BoundCase, s: &Scales, xi: &[i64]) -> Result<Complex64> {
    case.kind.validate()?;
    let n = match case.kind {
        CaseKind::ResonanceAsymptotic | CaseKind::SigmaJ(_) | CaseKind::NuSymbol => 3,
        _ => 4,
    };
    if xi.len() != n {
        return Err(Error::domain(format!("expected {n} frequencies, got {}", xi.len())));
    }
    if xi.iter().sum::<i64>() != 0 {
        return Err(Error::domain("frequencies must sum to zero"));
    }
    let a = case.alpha;
    let re = |v: f64| Complex64::new(v, 0.0);
    match case.kind {
        CaseKind::ResonanceAsymptotic => {
            if xi.contains(&0) {
                return Err(Error::domain("zero frequency in resonance triple"));
            }
            Ok(re(resonance_frac(a, xi[0], xi[1], xi[2])))
        }
        CaseKind::SigmaJ(j) => symbols::sigma_j(j, [s.k1, s.k2, s.k3], [xi[0], xi[1], xi[2]]),
        CaseKind::NuSymbol => Ok(re(symbols::nu(s.k1, s.k3, [xi[0], xi[1], xi[2]]))),
        CaseKind::InvResonanceDiff => Ok(re(inv_resonance_gap(a, xi[0], xi[1], xi[2], xi[3])?)),
        CaseKind::MFamily(j) => symbols::m_family(j, a, s.four(), [xi[0], xi[1], xi[2], xi[3]]),
        CaseKind::AFamily(i) => Ok(re(symbols::a_family(
            i,
            a,
            s.k1,
            s.k3,
            [xi[0], xi[1], xi[2], xi[3]],
        )?)),
        CaseKind::APrimeFamily(i) => Ok(re(symbols::a_prime_family(
            i,
            a,
            s.k1,
            s.k3,
            [xi[0], xi[1], xi[2], xi[3]],
        )?)),
    }
}

#[derive(Debug, Clone)]
struct Partial {
    lead: u32,
    max_ratio: f64,
    min_ratio: f64,
    witness: Option<Witness>,
    evaluated: u64,
    total: u64,
    subsampled: bool,
}

const REFINE_STARTS: usize = 32;

/// Pattern search from a sampled tuple: each free coordinate moves by
/// ±2^j positions in its support while the ratio improves. Only tuples that
/// were actually evaluated can become the maximum, so the result stays a
/// lower bound of the true maximum.
fn refine<V>(sets: &[Vec<i64>], mut pick: Vec<usize>, part: &mut Partial, visit: &V)
where
    V: Fn(&[i64], &mut Partial) -> Option<f64>,
{
    const MAX_ROUNDS: usize = 64;
    let mut free: Vec<i64> = pick.iter().zip(sets).map(|(&p, set)| set[p]).collect();
    let Some(mut current) = visit(&free, part) else {
        return;
    };
    for _ in 0..MAX_ROUNDS {
        let mut improved = false;
        for d in 0..sets.len() {
            let len = sets[d].len() as i64;
            let mut step = 1i64;
            while step < len {
                for dir in [step, -step] {
                    let cand = pick[d] as i64 + dir;
                    if cand < 0 || cand >= len {
                        continue;
                    }
                    free[d] = sets[d][cand as usize];
                    match visit(&free, part) {
                        Some(r) if r > current => {
                            current = r;
                            pick[d] = cand as usize;
                            improved = true;
                        }
                        _ => free[d] = sets[d][pick[d]],
                    }
                }
                step *= 2;
            }
        }
        if !improved {
            break;
        }
    }
}

fn scan_assignment(
    case: &BoundCase,
    idx: usize,
    lead: u32,
    s: &Scales,
    share: u64,
    opts: &ScanOptions,
) -> Result<Partial> {
    let sets = free_sets(case.kind, s);
    let total: u64 = sets
        .iter()
        .map(|v| v.len() as u64)
        .try_fold(1u64, |acc, n| acc.checked_mul(n))
        .unwrap_or(u64::MAX);
    let maj = majorant(case, s);
    let mut part = Partial {
        lead,
        max_ratio: 0.0,
        min_ratio: f64::INFINITY,
        witness: None,
        evaluated: 0,
        total,
        subsampled: false,
    };
    let visit = |free: &[i64], part: &mut Partial| -> Option<f64> {
        // degenerate tuples (a vanishing resonance) are skipped
        let Ok(Some((v, xi))) = eval_free(case, s, free) else {
            return None;
        };
        {
            part.evaluated += 1;
            let r = v / maj;
            if r > part.max_ratio {
                part.max_ratio = r;
                part.witness = Some(Witness {
                    scales: *s,
                    xi,
                    value: v,
                    majorant: maj,
                });
            }
            if r > 0.0 && r < part.min_ratio {
                part.min_ratio = r;
            }
            Some(r)
        }
    };
    let mut free = vec![0i64; sets.len()];
    if total <= share {
        let mut counters = vec![0usize; sets.len()];
        if sets.iter().any(|v| v.is_empty()) {
            return Ok(part);
        }
        loop {
            for (f, (set, &c)) in free.iter_mut().zip(sets.iter().zip(&counters)) {
                *f = set[c];
            }
            let _ = visit(&free, &mut part);
            let mut d = sets.len();
            loop {
                if d == 0 {
                    return Ok(part);
                }
                d -= 1;
                counters[d] += 1;
                if counters[d] < sets[d].len() {
                    break;
                }
                counters[d] = 0;
            }
        }
    } else {
        if !opts.allow_subsample {
            return Err(Error::resource(format!(
                "assignment {s:?} has {total} tuples, above its budget share {share}"
            )));
        }
        part.subsampled = true;
        let mut rng = ChaCha8Rng::seed_from_u64(
            opts.seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut pick = vec![0usize; sets.len()];
        // best few samples, each used as a start for the local search
        let mut starts: Vec<(f64, Vec<usize>)> = Vec::with_capacity(REFINE_STARTS + 1);
        for _ in 0..share {
            for ((f, p), set) in free.iter_mut().zip(pick.iter_mut()).zip(&sets) {
                *p = rng.random_range(0..set.len());
                *f = set[*p];
            }
            if let Some(r) = visit(&free, &mut part) {
                if starts.len() < REFINE_STARTS || r > starts[starts.len() - 1].0 {
                    let at = starts.partition_point(|(q, _)| *q >= r);
                    starts.insert(at, (r, pick.clone()));
                    starts.truncate(REFINE_STARTS);
                }
            }
        }
        for (_, start) in starts {
            refine(&sets, start, &mut part, &visit);
        }
        Ok(part)
    }
}

fn finish(
    case: &BoundCase,
    opts: &ScanOptions,
    assignments: usize,
    partials: Vec<Partial>,
) -> ConstantReport {
    let mut per_scale: Vec<ScaleStat> = Vec::new();
    let mut best: Option<Witness> = None;
    let mut max_ratio: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    let mut evaluated = 0;
    let mut total: u64 = 0;
    let mut subsampled = false;
    for p in partials {
        evaluated += p.evaluated;
        total = total.saturating_add(p.total);
        subsampled |= p.subsampled;
        if p.max_ratio > max_ratio {
            max_ratio = p.max_ratio;
            best = p.witness.clone();
        }
        min_ratio = min_ratio.min(p.min_ratio);
        match per_scale.iter_mut().find(|s| s.scale == p.lead) {
            Some(s) => {
                s.max_ratio = s.max_ratio.max(p.max_ratio);
                s.min_ratio = s.min_ratio.min(p.min_ratio);
                s.evaluated += p.evaluated;
                s.total = s.total.saturating_add(p.total);
            }
            None => per_scale.push(ScaleStat {
                scale: p.lead,
                max_ratio: p.max_ratio,
                min_ratio: p.min_ratio,
                evaluated: p.evaluated,
                total: p.total,
            }),
        }
    }
    per_scale.sort_by_key(|s| s.scale);
    per_scale.retain(|s| s.evaluated > 0);
    let trend: Vec<f64> = per_scale
        .iter()
        .filter(|s| s.scale >= opts.trend_min_scale)
        .map(|s| s.max_ratio)
        .collect();
    let stability_delta = match per_scale.len() {
        n if n >= 2 => {
            let a = per_scale[n - 2].max_ratio;
            let b = per_scale[n - 1].max_ratio;
            if a > 0.0 {
                (b - a).abs() / a
            } else {
                0.0
            }
        }
        _ => 0.0,
    };
    ConstantReport {
        case: case.kind.id(),
        alpha: case.alpha,
        max_ratio,
        min_ratio,
        argmax: best,
        per_scale,
        stability_delta,
        trend_slope: stats::log_trend(&trend),
        trend_min_scale: opts.trend_min_scale,
        assignments,
        tuples_evaluated: evaluated,
        tuples_total: total,
        subsampled,
        seed: opts.seed,
        budget: opts.budget,
    }
}

fn resonance_scan(case: &BoundCase, opts: &ScanOptions) -> Result<ConstantReport> {
    let m: i64 = 1 << case.k_max;
    let total = (2 * m as u64) * (2 * m as u64 + 1);
    if total > opts.budget && !opts.allow_subsample {
        return Err(Error::resource(format!(
            "resonance box 2^{} needs {total} tuples, above the budget {}",
            case.k_max, opts.budget
        )));
    }
    let a = case.alpha;
    let partials: Vec<Partial> = (1..=m)
        .into_par_iter()
        .map(|x1| {
            let mut part = Partial {
                lead: 0,
                max_ratio: 0.0,
                min_ratio: f64::INFINITY,
                witness: None,
                evaluated: 0,
                total: 0,
                subsampled: false,
            };
            let mut per: Vec<Partial> = Vec::new();
            for x2 in -m..=m {
                let x3 = -x1 - x2;
                if x2 == 0 || x3 == 0 || x3.abs() > m {
                    continue;
                }
                let mut mags = [x1.abs(), x2.abs(), x3.abs()];
                mags.sort_unstable();
                if mags[2] <= 1 {
                    continue;
                }
                let maj = (mags[2] as f64).powf(a) * mags[0] as f64;
                let v = resonance_frac(a, x1, x2, x3).abs();
                let r = v / maj;
                let lead = 63 - (mags[2] as u64).leading_zeros();
                let slot = match per.iter_mut().position(|p| p.lead == lead) {
                    Some(i) => &mut per[i],
                    None => {
                        per.push(Partial { lead, ..part.clone() });
                        per.last_mut().unwrap()
                    }
                };
                slot.evaluated += 2;
                slot.total += 2;
                if r > slot.max_ratio {
                    slot.max_ratio = r;
                    slot.witness = Some(Witness {
                        scales: Scales::default(),
                        xi: vec![x1, x2, x3],
                        value: v,
                        majorant: maj,
                    });
                }
                slot.min_ratio = slot.min_ratio.min(r);
            }
            part.evaluated = 0;
            per
        })
        .flatten()
        .collect();
    Ok(finish(case, opts, 0, partials))
}

/// Water-filling split of the budget: small assignments are enumerated in
/// full and the remainder is shared evenly among the large ones.
fn allocate(totals: &[u64], budget: u64) -> Vec<u64> {
    let mut order: Vec<usize> = (0..totals.len()).collect();
    order.sort_by_key(|&i| totals[i]);
    let mut shares = vec![0; totals.len()];
    let mut left = budget;
    for (pos, &i) in order.iter().enumerate() {
        let fair = (left / (totals.len() - pos) as u64).max(1);
        shares[i] = totals[i].min(fair);
        left = left.saturating_sub(shares[i]);
    }
    shares
}

/// Scans the case and reports the worst observed constant.
pub fn worst_constant(case: &BoundCase, opts: &ScanOptions) -> Result<ConstantReport> {
    case.kind.validate()?;
    if case.kind == CaseKind::ResonanceAsymptotic {
        return resonance_scan(case, opts);
    }
    let scales = enumerate_scales(case);
    worst_constant_for(case, &scales, opts)
}

/// Like [`worst_constant`] but over an explicit list of `(lead, scales)`.
pub fn worst_constant_for(
    case: &BoundCase,
    scales: &[(u32, Scales)],
    opts: &ScanOptions,
) -> Result<ConstantReport> {
    case.kind.validate()?;
    if scales.is_empty() {
        return Ok(finish(case, opts, 0, Vec::new()));
    }
    let totals: Vec<u64> = scales
        .iter()
        .map(|(_, s)| {
            free_sets(case.kind, s)
                .iter()
                .map(|v| v.len() as u64)
                .try_fold(1u64, |acc, n| acc.checked_mul(n))
                .unwrap_or(u64::MAX)
        })
        .collect();
    let shares = allocate(&totals, opts.budget);
    let partials: Result<Vec<Partial>> = scales
        .par_iter()
        .zip(shares.par_iter())
        .enumerate()
        .map(|(i, ((lead, s), &share))| scan_assignment(case, i, *lead, s, share, opts))
        .collect();
    Ok(finish(case, opts, scales.len(), partials?))
}
