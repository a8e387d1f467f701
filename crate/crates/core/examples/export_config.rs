//! Parses a configuration document, solves it and writes JSON and CSV.

use dgbo::io::{parse_config, run_csv, run_solve, Envelope};
use dgbo::solver::RunRecord;

fn main() -> dgbo::Result<()> {
    let cfg = parse_config(
        "seed = 4\n\
         solver.alpha = 0.6\n\
         solver.n_points = 128\n\
         solver.horizon = 0.2\n\
         solver.initial = \"random\"\n\
         solver.s = 1.5\n\
         solver.record_every = 20\n",
    )?;
    print!("effective configuration:\n{}", cfg.to_text());

    let rec = run_solve(&cfg)?;
    let dir = std::env::temp_dir().join("dgbo-export-example");
    std::fs::create_dir_all(&dir)?;

    let json = Envelope::new(&cfg, &rec).to_json()?;
    std::fs::write(dir.join("run.json"), &json)?;
    let back: Envelope<RunRecord> = Envelope::from_json(&json)?;
    assert_eq!(back.payload, rec);

    let csv = run_csv(&Envelope::new(&cfg, &rec));
    std::fs::write(dir.join("run.csv"), &csv)?;
    println!("\nwrote {}", dir.display());
    for line in csv.lines().filter(|l| !l.starts_with('#')) {
        println!("{line}");
    }
    Ok(())
}
