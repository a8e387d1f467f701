//! Resonance window and worst constants of the symbol bounds.
//!
//! Pass a case id (`resonance`, `inv-resonance`, `sigma1`..`sigma3`,
//! `m1`..`m5`, `a1`.., `aprime1`.., `nu`) and optionally `alpha` and `k_max`.

use dgbo::resonance::{resonance_window, worst_constant, BoundCase, CaseKind, ScanOptions};
use dgbo::DispersionSpec;

fn main() -> dgbo::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let case = args.first().map_or("sigma2", String::as_str);
    let alpha: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let k_max: u32 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(9);

    for bound in [128, 256] {
        let (w, n) = resonance_window(&DispersionSpec::fractional(alpha)?, bound)?;
        println!("|Omega| / (|xi1*|^a |xi3*|), box {bound}: [{:.4}, {:.4}] over {n} triples", w.min, w.max);
    }

    let report = worst_constant(&BoundCase::new(CaseKind::parse(case)?, alpha, k_max), &ScanOptions::default())?;
    println!("\n{case} at alpha = {alpha}: max ratio {:.4}", report.max_ratio);
    for s in &report.per_scale {
        println!("  scale {:>2}: max {:.4}  ({} of {} tuples)", s.scale, s.max_ratio, s.evaluated, s.total);
    }
    println!(
        "trend slope (scales >= {}): {:.4}, subsampled: {}",
        report.trend_min_scale, report.trend_slope, report.subsampled
    );
    if let Some(w) = &report.argmax {
        println!("worst tuple {:?}", w.xi);
    }
    Ok(())
}
