//! `(f_1 ∗ … ∗ f_n)(0, 0)` for three or four box functions and the
//! dyadic majorants it is compared against.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::box_function::{BoxFunction, BoxGrid, Row, Storage};
use crate::error::{Error, Result};
use crate::spectral::{plan_forward, plan_inverse};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `2^{l3*/2} 2^{k3*/2}` (three functions) and
    /// `2^{(l3*+l4*)/2} 2^{(k3*+k4*)/2}` (four).
    Generic,
    /// `(1 + 2^{l3* - α k1*})^{1/2} 2^{l1*/2}` (three functions) and
    /// `(1 + 2^{l3* - α k1*})^{1/2} 2^{(l1*+l2*)/2} 2^{k4*/2}` (four).
    Improved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub arity: usize,
    pub ls: Vec<u32>,
    pub ks: Vec<u32>,
    pub variant: BoundVariant,
    pub value: f64,
    pub majorant: f64,
    pub ratio: f64,
}

fn decreasing(v: &[u32]) -> Vec<f64> {
    let mut s: Vec<f64> = v.iter().map(|&x| x as f64).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Majorant without the product of norms.
pub fn majorant_factor(ls: &[u32], ks: &[u32], alpha: f64, variant: BoundVariant) -> Result<f64> {
    if ls.len() != ks.len() || !(3..=4).contains(&ls.len()) {
        return Err(Error::config("majorants need three or four (l, k) pairs"));
    }
    let l = decreasing(ls);
    let k = decreasing(ks);
    let p = f64::exp2;
    Ok(match (variant, ls.len()) {
        (BoundVariant::Generic, 3) => p(l[2] / 2.0) * p(k[2] / 2.0),
        (BoundVariant::Generic, _) => p((l[2] + l[3]) / 2.0) * p((k[2] + k[3]) / 2.0),
        (BoundVariant::Improved, 3) => (1.0 + p(l[2] - alpha * k[0])).sqrt() * p(l[0] / 2.0),
        (BoundVariant::Improved, _) => {
            (1.0 + p(l[2] - alpha * k[0])).sqrt() * p((l[0] + l[1]) / 2.0) * p(k[3] / 2.0)
        }
    })
}

/// Full linear convolution of two sequences.
#[cfg(test)]
pub(crate) fn linear_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    convolve_all(&[a, b])
}

/// Full linear convolution of several nonnegative sequences, directly for
/// short inputs and through one FFT product otherwise.
pub(crate) fn convolve_all(seqs: &[&[f64]]) -> Vec<f64> {
    if seqs.iter().any(|s| s.is_empty()) {
        return Vec::new();
    }
    let n = seqs.iter().map(|s| s.len()).sum::<usize>() + 1 - seqs.len();
    let longest = seqs.iter().map(|s| s.len()).max().unwrap_or(0);
    if n - longest <= 64 {
        let mut out = seqs[0].to_vec();
        for s in &seqs[1..] {
            let mut next = vec![0.0; out.len() + s.len() - 1];
            for (i, &x) in out.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                for (j, &y) in s.iter().enumerate() {
                    next[i + j] += x * y;
                }
            }
            out = next;
        }
        return out;
    }
    let m = n.next_power_of_two();
    let fwd = plan_forward(m);
    let mut acc = vec![Complex64::new(1.0, 0.0); m];
    for s in seqs {
        let mut c = vec![Complex64::new(0.0, 0.0); m];
        for (ci, &x) in c.iter_mut().zip(s.iter()) {
            ci.re = x;
        }
        fwd.process(&mut c);
        for (a, x) in acc.iter_mut().zip(&c) {
            *a *= x;
        }
    }
    plan_inverse(m).process(&mut acc);
    // inputs are nonnegative; clip roundoff below zero
    acc[..n].iter().map(|c| (c.re / m as f64).max(0.0)).collect()
}

/// Dense `ξ ↦ row index` table.
struct Lookup {
    lo: i64,
    idx: Vec<u32>,
}

impl Lookup {
    fn new(xis: &[i64]) -> Self {
        let lo = xis.iter().copied().min().unwrap_or(0);
        let hi = xis.iter().copied().max().unwrap_or(-1);
        let mut idx = vec![u32::MAX; (hi - lo + 1).max(0) as usize];
        for (i, &x) in xis.iter().enumerate() {
            idx[(x - lo) as usize] = i as u32;
        }
        Self { lo, idx }
    }

    fn get(&self, xi: i64) -> Option<usize> {
        let o = xi - self.lo;
        if o < 0 {
            return None;
        }
        match self.idx.get(o as usize) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }
}

struct Slots<'a> {
    xis: Vec<Vec<i64>>,
    lookup: Vec<Lookup>,
    fs: &'a [BoxFunction],
}

/// Enumerates all frequency tuples with zero sum, solving for the slot with
/// the most frequencies. Calls `visit(indices)` with row indices per slot.
fn for_each_tuple<F: Fn(&[usize]) -> f64 + Sync>(slots: &Slots, visit: F) -> f64 {
    let n = slots.fs.len();
    let dep = (0..n)
        .max_by_key(|&i| (slots.xis[i].len(), i))
        .expect("nonempty");
    let free: Vec<usize> = (0..n).filter(|&i| i != dep).collect();
    let first = free[0];
    let rest = &free[1..];
    slots.xis[first]
        .par_iter()
        .enumerate()
        .map(|(i0, &x0)| {
            let mut idx = vec![0usize; n];
            idx[first] = i0;
            let mut acc = 0.0;
            let mut counters = vec![0usize; rest.len()];
            loop {
                let mut sum = x0;
                for (c, &slot) in counters.iter().zip(rest) {
                    idx[slot] = *c;
                    sum += slots.xis[slot][*c];
                }
                if let Some(j) = slots.lookup[dep].get(-sum) {
                    idx[dep] = j;
                    acc += visit(&idx);
                }
                let mut d = rest.len();
                loop {
                    if d == 0 {
                        return acc;
                    }
                    d -= 1;
                    counters[d] += 1;
                    if counters[d] < slots.xis[rest[d]].len() {
                        break;
                    }
                    counters[d] = 0;
                }
            }
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// `Δτ^{n-1} Σ_{Σξ=0} Σ_{Στ=0} Π f_i(τ_i, ξ_i)`.
pub fn convolution_at_origin(fs: &[BoxFunction]) -> Result<f64> {
    if !(3..=4).contains(&fs.len()) {
        return Err(Error::config(format!(
            "convolution needs three or four functions, got {}",
            fs.len()
        )));
    }
    let grid: &BoxGrid = fs[0].grid();
    if fs.iter().any(|f| !f.grid().compatible(grid)) {
        return Err(Error::config("box functions live on different grids"));
    }
    let weight = grid.dtau.powi(fs.len() as i32 - 1);
    let separable = fs
        .iter()
        .all(|f| matches!(f.storage, Storage::Separable { .. }));
    if separable {
        Ok(weight * separable_sum(fs))
    } else {
        Ok(weight * general_sum(fs))
    }
}

fn separable_sum(fs: &[BoxFunction]) -> f64 {
    let parts: Vec<(&Vec<i64>, &Vec<i64>, &Vec<f64>, &Vec<f64>, i64)> = fs
        .iter()
        .map(|f| match &f.storage {
            Storage::Separable {
                xis,
                anchors,
                weights,
                profile,
                offset,
            } => (xis, anchors, weights, profile, *offset),
            Storage::Explicit(_) => unreachable!(),
        })
        .collect();
    let profiles: Vec<&[f64]> = parts.iter().map(|p| p.3.as_slice()).collect();
    let combined = convolve_all(&profiles);
    let offset_sum: i64 = parts.iter().map(|p| p.4).sum();
    let slots = Slots {
        xis: parts.iter().map(|p| p.0.clone()).collect(),
        lookup: parts.iter().map(|p| Lookup::new(p.0)).collect(),
        fs,
    };
    for_each_tuple(&slots, |idx| {
        // Σ (anchor + offset + j) = 0  ⇔  Σ j = -(Σ anchor + Σ offset)
        let mut anchor_sum = offset_sum;
        let mut w = 1.0;
        for (p, &i) in parts.iter().zip(idx) {
            anchor_sum += p.1[i];
            w *= p.2[i];
        }
        let t = -anchor_sum;
        if t < 0 || t as usize >= combined.len() {
            0.0
        } else {
            w * combined[t as usize]
        }
    })
}

fn general_sum(fs: &[BoxFunction]) -> f64 {
    let rows: Vec<Vec<Row>> = fs.iter().map(|f| f.rows()).collect();
    let slots = Slots {
        xis: rows.iter().map(|r| r.iter().map(|x| x.xi).collect()).collect(),
        lookup: rows
            .iter()
            .map(|r| Lookup::new(&r.iter().map(|x| x.xi).collect::<Vec<_>>()))
            .collect(),
        fs,
    };
    for_each_tuple(&slots, |idx| {
        let seqs: Vec<&[f64]> = rows.iter().zip(idx).map(|(r, &i)| r[i].values.as_slice()).collect();
        let acc = convolve_all(&seqs);
        let start: i64 = rows.iter().zip(idx).map(|(r, &i)| r[i].start).sum();
        let t = -start;
        if t < 0 || t as usize >= acc.len() {
            0.0
        } else {
            acc[t as usize]
        }
    })
}

/// Convolution value, majorant and their ratio.
pub fn multi_convolution_at_origin(
    fs: &[BoxFunction],
    variant: BoundVariant,
) -> Result<ConvolutionReport> {
    let value = convolution_at_origin(fs)?;
    let ls: Vec<u32> = fs.iter().map(|f| f.l()).collect();
    let ks: Vec<u32> = fs.iter().map(|f| f.k()).collect();
    let alpha = fs[0].grid().dispersion.alpha();
    let norms: f64 = fs.iter().map(|f| f.l2_norm()).product();
    let majorant = majorant_factor(&ls, &ks, alpha, variant)? * norms;
    let ratio = if majorant > 0.0 { value / majorant } else { 0.0 };
    Ok(ConvolutionReport {
        arity: fs.len(),
        ls,
        ks,
        variant,
        value,
        majorant,
        ratio,
    })
}

/// Dyadic labels of one configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxConfig {
    pub ls: Vec<u32>,
    pub ks: Vec<u32>,
}

/// Configurations indexed by a scale `j = 1..=k_cap`: two functions at
/// frequency scale `j`, the others at `⌈j/2⌉`, and all modulation scales
/// `min(j + 2, l_cap)`.
pub fn scale_ladder(arity: usize, grid: &BoxGrid) -> Vec<BoxConfig> {
    (1..=grid.k_cap)
        .map(|j| {
            let l = (j + 2).min(grid.l_cap);
            let low = j.div_ceil(2);
            let mut ks = vec![j, j];
            ks.resize(arity, low);
            BoxConfig {
                ls: vec![l; arity],
                ks,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigStat {
    pub config: BoxConfig,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub argmax_draw: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub arity: usize,
    pub variant: BoundVariant,
    pub alpha: f64,
    pub draws: usize,
    pub seed: u64,
    pub per_config: Vec<ConfigStat>,
    /// Least-squares slope of `ln(max ratio)` over the configuration
    /// index, restricted to configurations from `trend_from` on.
    pub trend_slope: f64,
    pub trend_from: usize,
    /// Same slope over every configuration.
    pub full_slope: f64,
}

fn draw_seed(seed: u64, config: usize, draw: usize, slot: usize) -> u64 {
    let mut h = seed ^ 0x243F_6A88_85A3_08D3;
    for v in [config as u64, draw as u64, slot as u64] {
        h = (h ^ v).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(29);
    }
    h
}

/// Draws `draws` random tuples per configuration and records the ratio of
/// the convolution value to the majorant. The trend is fitted over the
/// configurations with index `>= trend_from`.
pub fn ratio_scan(
    grid: &BoxGrid,
    configs: &[BoxConfig],
    variant: BoundVariant,
    draws: usize,
    seed: u64,
    trend_from: usize,
) -> Result<RatioScan> {
    let arity = configs.first().map(|c| c.ls.len()).unwrap_or(3);
    let mut per_config = Vec::with_capacity(configs.len());
    for (ci, cfg) in configs.iter().enumerate() {
        if cfg.ls.len() != arity || cfg.ks.len() != arity {
            return Err(Error::config("configurations must share one arity"));
        }
        let ratios: Result<Vec<f64>> = (0..draws)
            .into_par_iter()
            .map(|d| {
                let fs: Result<Vec<BoxFunction>> = cfg
                    .ls
                    .iter()
                    .zip(&cfg.ks)
                    .enumerate()
                    .map(|(s, (&l, &k))| BoxFunction::sample(grid, l, k, draw_seed(seed, ci, d, s)))
                    .collect();
                Ok(multi_convolution_at_origin(&fs?, variant)?.ratio)
            })
            .collect();
        let ratios = ratios?;
        let (argmax_draw, max_ratio) = ratios
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |b, (i, r)| if r > b.1 { (i, r) } else { b });
        per_config.push(ConfigStat {
            config: cfg.clone(),
            max_ratio,
            mean_ratio: ratios.iter().sum::<f64>() / ratios.len().max(1) as f64,
            argmax_draw,
        });
    }
    let maxima: Vec<f64> = per_config.iter().map(|c| c.max_ratio).collect();
    Ok(RatioScan {
        arity,
        variant,
        alpha: grid.dispersion.alpha(),
        draws,
        seed,
        trend_slope: stats::log_trend(&maxima[trend_from.min(maxima.len())..]),
        trend_from,
        full_slope: stats::log_trend(&maxima),
        per_config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DispersionSpec;

    fn grid() -> BoxGrid {
        BoxGrid::new(DispersionSpec::fractional(0.5).unwrap())
    }

    #[test]
    fn convolve_small_and_fft_agree() {
        let a: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let b: Vec<f64> = (0..90).map(|i| (i as f64 * 0.11).cos().abs()).collect();
        let fast = linear_convolve(&a, &b);
        let mut slow = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn separable_matches_rows() {
        let g = grid();
        let fs: Vec<BoxFunction> = [(4, 3), (4, 3), (3, 1)]
            .iter()
            .enumerate()
            .map(|(i, &(l, k))| BoxFunction::sample(&g, l, k, 100 + i as u64).unwrap())
            .collect();
        let fast = convolution_at_origin(&fs).unwrap();
        let ex: Vec<BoxFunction> = fs.iter().map(|f| f.to_explicit()).collect();
        let slow = convolution_at_origin(&ex).unwrap();
        assert!(fast > 0.0);
        assert!((fast - slow).abs() <= 1e-12 * slow);
    }

    #[test]
    fn majorant_values() {
        let m = majorant_factor(&[4, 2, 6], &[3, 5, 1], 0.5, BoundVariant::Generic).unwrap();
        assert!((m - 2f64.powf(1.5)).abs() < 1e-15);
        let m = majorant_factor(&[4, 2, 6, 0], &[3, 5, 1, 2], 0.5, BoundVariant::Generic).unwrap();
        assert!((m - 2f64.powf(1.0 + 1.5)).abs() < 1e-15);
        let m = majorant_factor(&[4, 2, 6], &[3, 4, 1], 0.5, BoundVariant::Improved).unwrap();
        assert!((m - 2f64.sqrt() * 8.0).abs() < 1e-14);
        assert!(majorant_factor(&[1, 2], &[1, 2], 0.5, BoundVariant::Generic).is_err());
    }

    #[test]
    fn arity_and_grid_checks() {
        let g = grid();
        let f = BoxFunction::sample(&g, 1, 1, 1).unwrap();
        assert!(convolution_at_origin(&[f.clone(), f.clone()]).is_err());
        let other = BoxGrid::new(DispersionSpec::fractional(0.75).unwrap());
        let h = BoxFunction::sample(&other, 1, 1, 1).unwrap();
        assert!(matches!(
            convolution_at_origin(&[f.clone(), f, h]),
            Err(Error::Config(_))
        ));
    }
}
