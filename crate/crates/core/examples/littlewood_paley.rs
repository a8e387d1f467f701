//! Dyadic cutoffs, projections and block Sobolev norms.

use dgbo::littlewood_paley::{chi, chi_k, chi_k_positive_support, lp_project, sobolev_norm, BUMP_ID};
use dgbo::experiments::random_smooth_datum;
use dgbo::TorusGrid;

fn main() -> dgbo::Result<()> {
    println!("bump: {BUMP_ID}");
    for x in [1.0, 1.3, 1.45, 1.6] {
        println!("chi({x}) = {:.6}", chi(x));
    }
    for k in 0..5 {
        let s = chi_k_positive_support(k);
        println!("chi_{k}: support {s:?}, chi_{k}(2^{k}) = {:.6}", chi_k(k, f64::powi(2.0, k as i32)));
    }

    let grid = TorusGrid::new(256)?;
    let u = random_smooth_datum(grid, 1.0, 1.0, 3)?;
    println!("||u||_H^1 = {:.6}", sobolev_norm(&u, 1.0));
    let mut total = 0.0;
    for k in 0..7 {
        let block = lp_project(&u, k).l2_norm_sq();
        total += block;
        println!("  |P_{k} u|^2 = {block:.3e}");
    }
    println!("sum of blocks {total:.6e}, |u|^2 {:.6e}", u.l2_norm_sq());
    Ok(())
}
