//! Checks the derivative and resonance conditions for the capillary Whitham
//! dispersion and for a fractional one.

use dgbo::dispersion::check_conditions;
use dgbo::DispersionSpec;

fn main() -> dgbo::Result<()> {
    for spec in [
        DispersionSpec::whitham_capillary(1.0, 10.0)?,
        DispersionSpec::fractional(0.5)?,
    ] {
        let r = check_conditions(&spec, 512)?;
        println!("{}", spec.label());
        println!("  effective alpha      {:.6}", r.effective_alpha);
        for (name, a, b) in [
            ("|w'|/|xi|^a", &r.base.first_derivative, &r.doubled.first_derivative),
            ("|w''|/|xi|^(a-1)", &r.base.second_derivative, &r.doubled.second_derivative),
            ("resonance ratio", &r.base.resonance, &r.doubled.resonance),
        ] {
            println!("  {name:<20} [{:.4}, {:.4}] -> [{:.4}, {:.4}]", a.min, a.max, b.min, b.max);
        }
        println!("  pass: {}", r.pass);
    }
    Ok(())
}
