//! Acceptance run: one PASS/FAIL line per criterion, each timed against its
//! budget. Reference values come from oracles written here, independent of
//! the library code paths they check.
//!
//! Criteria listed in `KNOWN_FAILING` still run and still print FAIL, but do
//! not fail the process; one that starts passing is reported so the list can
//! be pruned.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dgbo::dispersion::check_conditions;
use dgbo::estimates::{
    multi_convolution_at_origin, ratio_scan, s_phi, scale_ladder, BoundVariant, BoxFunction, BoxGrid,
    Trajectory,
};
use dgbo::experiments::{run_scenario, ScenarioConfig, ScenarioKind};
use dgbo::resonance::{
    m_family, resonance_window, sigma_j, worst_constant, BoundCase, CaseKind, FourScales, ScanOptions,
};
use dgbo::solver::{hamiltonian, solve, DtPolicy, RunRecord, SolverConfig};
use dgbo::{DispersionSpec, SpectralField, TorusGrid};

/// Conservation at dt = 1e-3: the magnitude bound is missed (see README).
const KNOWN_FAILING: &[usize] = &[2];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------- independent oracles ----------

fn omega(alpha: f64, xi: f64) -> f64 {
    -xi * xi.abs().powf(alpha)
}

fn bump(xi: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let r = xi.abs();
    if r <= 1.25 {
        return 1.0;
    }
    if r >= 1.6 {
        return 0.0;
    }
    let t = (1.6 - r) / (1.6 - 1.25);
    f(t) / (f(t) + f(1.0 - t))
}

fn chi_k(k: u32, xi: i64) -> f64 {
    let x = xi as f64;
    bump(x / f64::powi(2.0, k as i32)) - bump(x / f64::powi(2.0, k as i32 - 1))
}

/// `iξ1 χ²_{k1}(ξ1) χ_{k2}(ξ2) χ_{k3}(ξ3)`.
fn sigma_oracle(k: [u32; 3], xi: [i64; 3]) -> Complex64 {
    let c1 = chi_k(k[0], xi[0]);
    Complex64::new(0.0, xi[0] as f64 * c1 * c1 * chi_k(k[1], xi[1]) * chi_k(k[2], xi[2]))
}

fn resonance_oracle(alpha: f64, a: i64, b: i64, c: i64) -> f64 {
    omega(alpha, a as f64) + omega(alpha, b as f64) + omega(alpha, c as f64)
}

/// `m(ξa, ξb, ξ2, ξ3)` straight from its definition; `None` where the
/// resonance vanishes under a nonzero cutoff product.
fn m_oracle(alpha: f64, s: FourScales, xi: [i64; 4]) -> Option<Complex64> {
    let [xa, xb, x2, x3] = xi;
    let xab = xa + xb;
    let c1 = chi_k(s.k1, xab);
    let cut = c1 * c1 * chi_k(s.ka, xa) * chi_k(s.k2, x2) * chi_k(s.k3, x3) * chi_k(s.kb, xb);
    if cut == 0.0 {
        return Some(Complex64::new(0.0, 0.0));
    }
    let om = resonance_oracle(alpha, xab, x2, x3);
    if om == 0.0 {
        return None;
    }
    let left = Complex64::new(0.0, -(xab as f64)) * (cut / om);
    Some(left * Complex64::new(0.0, -(x3 as f64)))
}

/// `u(x)` on `m` equispaced points by direct trigonometric summation.
fn physical(u: &SpectralField, m: usize) -> Vec<f64> {
    let n = u.grid().n_points() as i64;
    (0..m)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / m as f64;
            let mut s = u.coeff(0).re;
            for xi in 1..n / 2 {
                let c = u.coeff(xi);
                s += 2.0 * (c * Complex64::from_polar(1.0, xi as f64 * x)).re;
            }
            s / (2.0 * PI)
        })
        .collect()
}

fn quartic_oracle(u: &SpectralField) -> f64 {
    // exact for band-limited u once m exceeds 4 times the band
    let m = 4 * u.grid().n_points() + 8;
    physical(u, m).iter().map(|v| v.powi(4)).sum::<f64>() * 2.0 * PI / m as f64
}

fn l2_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).expect("same grid").l2_norm()
}

fn cos_datum(grid: TorusGrid, amp: f64) -> SpectralField {
    SpectralField::from_positive(grid, |xi| {
        if xi == 1 {
            Complex64::new(amp * PI, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn fixed(alpha: f64, n: usize, dt: f64, horizon: f64) -> SolverConfig {
    SolverConfig::new(DispersionSpec::fractional(alpha).unwrap(), TorusGrid::new(n).unwrap())
        .with_dt(dt, DtPolicy::Fixed)
        .with_horizon(horizon)
}

fn relative_drifts(rec: &RunRecord) -> (f64, f64) {
    rec.relative_drift()
}

// ---------- criteria ----------

fn linear_exactness() -> Outcome {
    let grid = TorusGrid::new(64).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        for mode in [1i64, 3, 17] {
            let c0 = Complex64::new(0.7, -0.4);
            let u0 = SpectralField::from_positive(grid, |xi| if xi == mode { c0 } else { 0.0.into() });
            let cfg = fixed(alpha, 64, 0.05, 1.0).linear_only();
            let rec = solve(&u0, &cfg).unwrap();
            let want = c0 * Complex64::from_polar(1.0, omega(alpha, mode as f64));
            let got = &rec.final_state;
            for xi in -31..=31i64 {
                let expect = match xi {
                    x if x == mode => want,
                    x if x == -mode => want.conj(),
                    _ => 0.0.into(),
                };
                worst = worst.max((got.coeff(xi) - expect).norm());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max coefficient error {worst:.2e}"))
}

fn conservation() -> Outcome {
    let run = |dt: f64| {
        let cfg = fixed(0.5, 256, dt, 1.0);
        solve(&cos_datum(TorusGrid::new(256).unwrap(), 1.0), &cfg).unwrap()
    };
    let a = run(1e-3);
    let b = run(5e-4);
    let mean = a.mean_drift();
    let (ma, ha) = relative_drifts(&a);
    let (mb, hb) = relative_drifts(&b);
    let (rm, rh) = (ma / mb, ha / hb);
    let in_band = |r: f64| (10.0..=24.0).contains(&r);
    let pass = mean <= 1e-14 && ma <= 1e-7 && ha <= 1e-7 && in_band(rm) && in_band(rh);
    outcome(
        pass,
        format!(
            "mean drift {mean:.1e}, mass drift {ma:.2e}, hamiltonian drift {ha:.2e}, halving factors {rm:.1} / {rh:.1}"
        ),
    )
}

/// `u0 = a (sinh 1 / (cosh 1 - cos x) - 1)`, with `û(ξ) = 2πa e^{-|ξ|}`.
fn poisson_datum(grid: TorusGrid, a: f64) -> SpectralField {
    SpectralField::from_positive(grid, |xi| {
        if xi == 0 {
            0.0.into()
        } else {
            Complex64::new(2.0 * PI * a * (-(xi as f64)).exp(), 0.0)
        }
    })
}

fn convergence() -> Outcome {
    let grid = TorusGrid::new(64).unwrap();
    let u0 = poisson_datum(grid, 0.2);
    let at = |dt: f64| solve(&u0, &fixed(0.5, 64, dt, 1.0)).unwrap().final_state;
    let (u1, u2, u4) = (at(0.02), at(0.01), at(0.005));
    let order = (l2_diff(&u1, &u2) / l2_diff(&u2, &u4)).log2();

    let coarse = TorusGrid::new(256).unwrap();
    let fine = TorusGrid::new(512).unwrap();
    let a = solve(&poisson_datum(coarse, 0.2), &fixed(0.5, 256, 1e-3, 1.0)).unwrap();
    let b = solve(&poisson_datum(fine, 0.2), &fixed(0.5, 512, 1e-3, 1.0)).unwrap();
    let spatial = l2_diff(&a.final_state.resample(fine), &b.final_state);
    outcome(
        (order - 4.0).abs() <= 0.3 && spatial <= 1e-9,
        format!("temporal order {order:.3}, L2 change 256->512 {spatial:.2e}"),
    )
}

fn diagnostics_oracle() -> Outcome {
    let grid = TorusGrid::new(64).unwrap();
    let u = SpectralField::from_positive(grid, |xi| {
        if xi == 1 || xi == 2 {
            Complex64::new(PI, 0.0)
        } else {
            0.0.into()
        }
    });
    let h = hamiltonian(&u, &DispersionSpec::fractional(1.0).unwrap());
    // (1/4π)(2·1·π² + 2·2·π²) - (1/3)·3∫cos²x cos 2x = 3π/2 - π/2
    let h_rel = (h - PI).abs() / PI;
    let c = cos_datum(grid, 1.0);
    let mass = c.l2_norm_sq();
    let oracle_mass: f64 = physical(&c, 16).iter().map(|v| v * v).sum::<f64>() * 2.0 * PI / 16.0;
    let m_err = (mass - PI).abs().max((oracle_mass - PI).abs());
    outcome(
        h_rel <= 1e-10 && m_err <= 1e-12,
        format!("hamiltonian rel. error {h_rel:.1e}, mass error {m_err:.1e}"),
    )
}

fn window_oracle(alpha: f64, bound: i64) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for a in -bound..=bound {
        for b in -bound..=bound {
            let c = -a - b;
            if a == 0 || b == 0 || c == 0 || c.abs() > bound {
                continue;
            }
            let mut m = [a.abs(), b.abs(), c.abs()];
            m.sort_unstable();
            let r = resonance_oracle(alpha, a, b, c).abs() / ((m[2] as f64).powf(alpha) * m[0] as f64);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (lo, hi)
}

fn resonance_asymptotics() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for alpha in [0.25, 0.5, 0.75] {
        let spec = DispersionSpec::fractional(alpha).unwrap();
        let (w256, _) = resonance_window(&spec, 256).unwrap();
        let (w512, _) = resonance_window(&spec, 512).unwrap();
        let (lo, hi) = window_oracle(alpha, 256);
        let agree = (w256.min - lo).abs() <= 1e-12 * lo && (w256.max - hi).abs() <= 1e-12 * hi;
        let shift = ((w512.min - w256.min) / w256.min).abs().max(((w512.max - w256.max) / w256.max).abs());
        pass &= agree && w512.min > 0.0 && shift <= 0.1;
        details.push(format!("a={alpha}: [{:.3}, {:.3}] shift {:.1}%", w512.min, w512.max, 100.0 * shift));
    }
    outcome(pass, details.join("; "))
}

fn inverse_resonance() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for alpha in [0.25, 0.5, 0.75] {
        let case = BoundCase::new(CaseKind::InvResonanceDiff, alpha, 9);
        let r = worst_constant(&case, &ScanOptions::default()).unwrap();
        pass &= r.max_ratio.is_finite() && r.max_ratio > 0.0 && r.trend_slope <= 0.05;
        details.push(format!("a={alpha}: max {:.3} slope {:.3}", r.max_ratio, r.trend_slope));
    }
    outcome(pass, details.join("; "))
}

fn random_in_support(rng: &mut ChaCha8Rng, k: u32) -> i64 {
    loop {
        let hi = (1.6 * f64::powi(2.0, k as i32)) as i64;
        let v = rng.random_range(1..=hi.max(1));
        if chi_k(k, v) > 0.0 {
            return if rng.random_bool(0.5) { v } else { -v };
        }
    }
}

fn symbol_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sigma_err: f64 = 0.0;
    let mut n = 0;
    while n < 10_000 {
        let k1 = rng.random_range(3..=10u32);
        let k2 = (k1 as i64 + rng.random_range(-2..=2i64)).max(0) as u32;
        let k3 = rng.random_range(0..=k1.saturating_sub(3));
        let x3 = random_in_support(&mut rng, k3);
        let x2 = random_in_support(&mut rng, k2);
        let x1 = -x2 - x3;
        if x1 == 0 {
            continue;
        }
        let (k, xi) = ([k1, k2, k3], [x1, x2, x3]);
        let lhs = sigma_oracle(k, xi) + sigma_oracle(k, [x2, x1, x3]);
        let rhs: Complex64 = (1..=3).map(|j| sigma_j(j, k, xi).unwrap()).sum();
        sigma_err = sigma_err.max((lhs - rhs).norm());
        n += 1;
    }

    let alpha = 0.5;
    let mut m_err: f64 = 0.0;
    let mut n = 0;
    while n < 10_000 {
        let k1 = rng.random_range(4..=10u32);
        let s = FourScales {
            k1,
            ka: k1,
            kb: rng.random_range(0..=k1 - 3),
            k2: k1,
            k3: rng.random_range(0..=k1 - 3),
        };
        let xa = random_in_support(&mut rng, s.ka);
        let xb = random_in_support(&mut rng, s.kb);
        let x3 = random_in_support(&mut rng, s.k3);
        let x2 = -(xa + xb + x3);
        let xi = [xa, xb, x2, x3];
        let swapped = [x2, xb, xa, x3];
        if [xa + xb, x2 + xb, x2].contains(&0) {
            continue;
        }
        let (Some(l1), Some(l2)) = (m_oracle(alpha, s, xi), m_oracle(alpha, s, swapped)) else {
            continue;
        };
        let parts: Result<Vec<Complex64>, _> = (1..=5).map(|j| m_family(j, alpha, s, xi)).collect();
        let Ok(parts) = parts else { continue };
        let rhs: Complex64 = parts.iter().sum();
        let scale = l1.norm().max(l2.norm()).max(1.0);
        m_err = m_err.max((l1 + l2 - rhs).norm() / scale);
        n += 1;
    }

    let mut slopes = Vec::new();
    for j in 1..=3u8 {
        let case = BoundCase::new(CaseKind::SigmaJ(j), 0.5, 10);
        let r = worst_constant(&case, &ScanOptions::default()).unwrap();
        slopes.push(r.trend_slope);
    }
    let worst_slope = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        sigma_err <= 1e-12 && m_err <= 1e-12 && worst_slope <= 0.05,
        format!(
            "sigma split {sigma_err:.1e}, m split {m_err:.1e}, sigma_j slopes {:.3}/{:.3}/{:.3}",
            slopes[0], slopes[1], slopes[2]
        ),
    )
}

/// Direct sum over every tuple of rows; the library's separable fast path
/// is checked against it.
fn convolution_oracle(fs: &[BoxFunction]) -> f64 {
    let rows: Vec<_> = fs.iter().map(|f| f.rows()).collect();
    let dtau = fs[0].grid().dtau;
    let mut total = 0.0;
    let mut idx = vec![0usize; rows.len()];
    loop {
        let xi: i64 = rows.iter().zip(&idx).map(|(r, &i)| r[i].xi).sum();
        if xi == 0 {
            // sum over τ-index tuples with zero total
            let mut acc = std::collections::HashMap::<i64, f64>::new();
            acc.insert(0, 1.0);
            for (r, &i) in rows.iter().zip(&idx) {
                let row = &r[i];
                let mut next = std::collections::HashMap::new();
                for (s, w) in &acc {
                    for (j, v) in row.values.iter().enumerate() {
                        *next.entry(s + row.start + j as i64).or_insert(0.0) += w * v;
                    }
                }
                acc = next;
            }
            total += acc.get(&0).copied().unwrap_or(0.0);
        }
        let mut p = 0;
        loop {
            if p == idx.len() {
                return total * dtau.powi(fs.len() as i32 - 1);
            }
            idx[p] += 1;
            if idx[p] < rows[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

fn convolution_ratios() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;

    let g = BoxGrid::new(DispersionSpec::fractional(0.5).unwrap());
    let fs: Vec<BoxFunction> = [(5, 4), (5, 4), (4, 2)]
        .iter()
        .enumerate()
        .map(|(i, &(l, k))| BoxFunction::sample(&g, l, k, 40 + i as u64).unwrap())
        .collect();
    let rep = multi_convolution_at_origin(&fs, BoundVariant::Generic).unwrap();
    let direct = convolution_oracle(&fs);
    let oracle_ok = direct > 0.0 && (rep.value - direct).abs() <= 1e-12 * direct;
    pass &= oracle_ok;
    details.push(format!("oracle rel. diff {:.1e}", (rep.value - direct).abs() / direct));

    for (alpha, variant) in [(0.5, BoundVariant::Generic), (0.75, BoundVariant::Improved)] {
        let grid = BoxGrid::new(DispersionSpec::fractional(alpha).unwrap());
        for arity in [3usize, 4] {
            let ladder = scale_ladder(arity, &grid);
            let scan = ratio_scan(&grid, &ladder, variant, 200, 1, 6).unwrap();
            let finite = scan.per_config.iter().all(|c| c.max_ratio.is_finite());
            pass &= finite && scan.trend_slope <= 0.05;
            details.push(format!(
                "{variant:?} n={arity} a={alpha}: slope {:.3} (full ladder {:.3})",
                scan.trend_slope, scan.full_slope
            ));
        }
    }
    outcome(pass, details.join("; "))
}

fn s_phi_consistency() -> Outcome {
    let grid = TorusGrid::new(64).unwrap();
    let one = |_: i64, _: i64, _: i64, _: i64| Complex64::new(1.0, 0.0);
    let t_static = 0.8;
    let st = Trajectory::stationary(&cos_datum(grid, 1.0), t_static, 16).unwrap();
    let v = s_phi(&st, one, t_static).unwrap();
    let want = 6.0 * PI.powi(4) * t_static;
    let static_err = (v - want).norm() / want;

    let cfg = fixed(0.5, 64, 1e-2, 0.5).with_record_every(1).with_snapshots(true);
    let rec = solve(&cos_datum(grid, 0.5), &cfg).unwrap();
    let traj = Trajectory::from_record(&rec).unwrap();
    let t_end = *rec.times.last().unwrap();
    let got = s_phi(&traj, one, t_end).unwrap();
    let q: Vec<f64> = rec.snapshots.iter().map(quartic_oracle).collect();
    let integral: f64 = rec
        .times
        .windows(2)
        .zip(q.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum();
    let want_live = (2.0 * PI).powi(3) * integral;
    let live_err = (got - want_live).norm() / want_live.abs();
    outcome(
        static_err <= 1e-10 && live_err <= 1e-8,
        format!("static rel. error {static_err:.1e}, live rel. error {live_err:.1e}"),
    )
}

fn galilean() -> Outcome {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Galilean);
    cfg.horizon = 0.5;
    cfg.c_values = vec![0.0, 0.3, 1.0];
    let rep = run_scenario(&cfg).unwrap();
    let res: Vec<f64> = rep.entries.iter().map(|e| e.numerator).collect();
    let pass = res[0] == 0.0 && res[1] <= 1e-8 && res[2] <= 1e-8;
    outcome(
        pass,
        format!("residuals c=0: {:.1e}, c=0.3: {:.1e}, c=1: {:.1e}", res[0], res[1], res[2]),
    )
}

fn probes() -> Outcome {
    let alpha = 0.75;
    let s = 1.5 - alpha + 0.1;
    let base = |kind| {
        let mut c = ScenarioConfig::new(kind);
        c.alpha = alpha;
        c.s = s;
        c.horizon = 0.5;
        c.amplitude = 1.0;
        c
    };
    let mut a = base(ScenarioKind::Apriori);
    a.data_count = 20;
    let ap = run_scenario(&a).unwrap();
    let ap_max = ap.statistic("max_ratio").unwrap_or(f64::INFINITY);
    let ap_ok = ap.blow_up.is_none() && ap.pass == Some(true) && ap_max <= 10.0;

    let dl = run_scenario(&base(ScenarioKind::DifferenceLow)).unwrap();
    let change = dl.statistic("max_halving_change").unwrap_or(f64::INFINITY);
    let dl_ok = dl.blow_up.is_none() && change <= 0.2;

    let bs = run_scenario(&base(ScenarioKind::BonaSmith)).unwrap();
    let rn = bs.ratios();
    let bs_ok = bs.blow_up.is_none() && bs.pass == Some(true);
    outcome(
        ap_ok && dl_ok && bs_ok,
        format!(
            "apriori max ratio {ap_max:.3}; difference-low halving change {:.1}%; bona-smith r_n {:?} slope {:.3}",
            100.0 * change,
            rn.iter().map(|r| (r * 1e3).round() / 1e3).collect::<Vec<_>>(),
            bs.statistic("trend_slope").unwrap_or(f64::NAN)
        ),
    )
}

fn whitham() -> Outcome {
    let spec = DispersionSpec::whitham_capillary(1.0, 10.0).unwrap();
    let r = check_conditions(&spec, 512).unwrap();
    let eff_ok = (r.effective_alpha - 0.5).abs() <= 0.01;
    outcome(
        r.pass && eff_ok,
        format!(
            "effective alpha {:.5}, first-derivative window [{:.3}, {:.3}]",
            r.effective_alpha, r.base.first_derivative.min, r.base.first_derivative.max
        ),
    )
}

fn main() {
    type Criterion = (usize, &'static str, Duration, fn() -> Outcome);
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        (1, "linear exactness", secs(1), linear_exactness),
        (2, "conservation", secs(10), conservation),
        (3, "convergence orders", secs(60), convergence),
        (4, "diagnostics oracle", secs(1), diagnostics_oracle),
        (5, "resonance asymptotics", secs(60), resonance_asymptotics),
        (6, "inverse-resonance bound", secs(120), inverse_resonance),
        (7, "symbol identities", secs(60), symbol_identities),
        (8, "convolution ratios", secs(300), convolution_ratios),
        (9, "S_phi consistency", secs(30), s_phi_consistency),
        (10, "galilean identity", secs(30), galilean),
        (11, "behavioral probes", secs(600), probes),
        (12, "whitham capillary admissibility", secs(10), whitham),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut unexpected = Vec::new();
    for (id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.pass && elapsed <= budget;
        let known = KNOWN_FAILING.contains(&id);
        println!(
            "{} criterion {id:>2} {name}: {} [{:.2}s / {}s]{}",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            match (ok, known) {
                (false, true) => " (known failure)",
                (true, true) => " (listed as known failure but passed)",
                _ => "",
            }
        );
        if !ok && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
