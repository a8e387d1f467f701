//! Behavioral probes: a-priori growth, Galilean and scaling identities.
//!
//! `cargo run --release --example scenarios -- bona-smith` runs one kind.

use dgbo::experiments::{run_scenario, ScenarioConfig, ScenarioKind};

fn main() -> dgbo::Result<()> {
    let kinds = match std::env::args().nth(1) {
        Some(id) => vec![ScenarioKind::parse(&id)?],
        None => vec![ScenarioKind::Galilean, ScenarioKind::Scaling, ScenarioKind::Apriori],
    };
    for kind in kinds {
        let mut cfg = ScenarioConfig::new(kind);
        cfg.alpha = 0.75;
        cfg.s = 1.5 - cfg.alpha + 0.1;
        if kind == ScenarioKind::Apriori {
            cfg.data_count = 5;
        }
        let rep = run_scenario(&cfg)?;
        println!("{} (pass: {:?})", kind.id(), rep.pass);
        for e in &rep.entries {
            println!("  {:<24} {:.4e} / {:.4e} = {:?}", e.label, e.numerator, e.denominator, e.ratio);
        }
        for (name, v) in &rep.statistics {
            println!("  {name} = {v:.4e}");
        }
    }
    Ok(())
}
