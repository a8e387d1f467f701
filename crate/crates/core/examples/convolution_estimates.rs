//! Random box functions and the ratio of their convolution at the origin to
//! the majorant, across a ladder of dyadic scales.

use dgbo::estimates::{multi_convolution_at_origin, ratio_scan, scale_ladder, BoundVariant, BoxFunction, BoxGrid};
use dgbo::DispersionSpec;

fn main() -> dgbo::Result<()> {
    let grid = BoxGrid::new(DispersionSpec::fractional(0.75)?).with_caps(9, 7);

    let fs: Vec<BoxFunction> = [(6, 5), (6, 5), (5, 3)]
        .iter()
        .enumerate()
        .map(|(i, &(l, k))| BoxFunction::sample(&grid, l, k, i as u64))
        .collect::<dgbo::Result<_>>()?;
    for variant in [BoundVariant::Generic, BoundVariant::Improved] {
        let r = multi_convolution_at_origin(&fs, variant)?;
        println!("{variant:?}: value {:.4e}, majorant {:.4e}, ratio {:.4}", r.value, r.majorant, r.ratio);
    }

    for arity in [3, 4] {
        let scan = ratio_scan(&grid, &scale_ladder(arity, &grid), BoundVariant::Improved, 20, 11, 3)?;
        println!("\narity {arity}, 20 draws per configuration");
        for c in &scan.per_config {
            println!("  l {:?} k {:?}: max {:.4} mean {:.4}", c.config.ls, c.config.ks, c.max_ratio, c.mean_ratio);
        }
        println!("  trend slope {:.4} (full ladder {:.4})", scan.trend_slope, scan.full_slope);
    }
    Ok(())
}
