use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dgbo::dispersion::check_conditions;
use dgbo::experiments::{run_scenario, ScenarioKind};
use dgbo::io::{self, run_csv, table_csv, write_output, CsvTable, Envelope, Format, FullConfig};
use dgbo::solver::RunRecord;
use dgbo::{DispersionSpec, Error, Result};

/// Solver and verification toolkit for the dispersion-generalized
/// Benjamin–Ono equation on the torus.
#[derive(Parser)]
#[command(name = "dgbo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured initial datum and write the run record.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Scan a symbol or convolution bound for its worst constant.
    VerifyEstimates {
        #[arg(long)]
        case: String,
        #[arg(long)]
        kmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Check the derivative and resonance conditions of a dispersion relation.
    CheckDispersion {
        /// `whitham-capillary` or `fractional`.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.0)]
        kappa: f64,
        /// Exponent of the fractional family.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 512)]
        xi_max: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a behavioral scenario.
    Probe {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Convert a JSON run record to CSV, or solve the config and export it.
    Export {
        #[arg(long)]
        format: String,
        /// JSON run file written by `solve`.
        #[arg(long, conflicts_with = "config")]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display()))))
}

fn load_config(path: Option<&Path>) -> Result<FullConfig> {
    match path {
        Some(p) => io::parse_config(&read(p)?),
        None => Ok(FullConfig::default()),
    }
}

fn emit_table<T>(env: &Envelope<&T>, format: Format, out: Option<&Path>) -> Result<()>
where
    T: CsvTable + serde::Serialize,
{
    let text = match format {
        Format::Json => env.to_json()?,
        Format::Csv => table_csv(env),
    };
    write_output(out, &text)
}

fn emit_run(env: &Envelope<&RunRecord>, format: Format, out: Option<&Path>) -> Result<()> {
    let text = match format {
        Format::Json => env.to_json()?,
        Format::Csv => run_csv(env),
    };
    write_output(out, &text)
}

enum Status {
    Pass,
    Fail,
    BlowUp,
}

impl From<bool> for Status {
    fn from(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Solve { config, out, format } => {
            let format = Format::parse(&format)?;
            let cfg = load_config(config.as_deref())?;
            let rec = io::run_solve(&cfg)?;
            emit_run(&Envelope::new(&cfg, &rec), format, out.as_deref())?;
            Ok(Status::Pass)
        }
        Command::VerifyEstimates {
            case,
            kmax,
            out,
            config,
            alpha,
            format,
        } => {
            let format = Format::parse(&format)?;
            let mut cfg = load_config(config.as_deref())?;
            cfg.verifier.case = case;
            cfg.verifier.k_max = kmax;
            if let Some(a) = alpha {
                cfg.solver.alpha = a;
            }
            cfg.validate()?;
            let v = io::run_verification(&cfg)?;
            emit_table(&Envelope::new(&cfg, &v), format, out.as_deref())?;
            Ok(Status::from(v.pass()))
        }
        Command::CheckDispersion {
            spec,
            tau,
            kappa,
            alpha,
            xi_max,
            out,
        } => {
            let d = match spec.as_str() {
                "whitham-capillary" => DispersionSpec::whitham_capillary(tau, kappa)?,
                "fractional" => DispersionSpec::fractional(alpha)?,
                other => return Err(Error::Config(format!("unknown dispersion '{other}'"))),
            };
            let report = check_conditions(&d, xi_max)?;
            let mut env = Envelope::new(&FullConfig::default(), &report);
            env.config = format!(
                "check.spec = \"{spec}\"\ncheck.tau = {tau:?}\ncheck.kappa = {kappa:?}\ncheck.alpha = {alpha:?}\ncheck.xi_max = {xi_max}\n"
            );
            write_output(out.as_deref(), &env.to_json()?)?;
            Ok(Status::from(report.pass))
        }
        Command::Probe {
            kind,
            config,
            out,
            format,
        } => {
            let format = Format::parse(&format)?;
            let kind = ScenarioKind::parse(&kind)?;
            let mut cfg = load_config(config.as_deref())?;
            cfg.scenario.kind = kind;
            let report = run_scenario(&cfg.scenario_config(kind))?;
            emit_table(&Envelope::new(&cfg, &report), format, out.as_deref())?;
            if let Some(msg) = &report.blow_up {
                eprintln!("blow-up at {msg}");
                return Ok(Status::BlowUp);
            }
            Ok(Status::from(report.pass != Some(false)))
        }
        Command::Export {
            format,
            input,
            config,
            out,
        } => {
            let format = Format::parse(&format)?;
            match input {
                Some(p) => {
                    let env: Envelope<RunRecord> = Envelope::from_json(&read(&p)?)?;
                    let view = Envelope {
                        version: env.version.clone(),
                        bump_profile: env.bump_profile.clone(),
                        seed: env.seed,
                        config: env.config.clone(),
                        payload: &env.payload,
                    };
                    emit_run(&view, format, out.as_deref())?;
                }
                None => {
                    let cfg = load_config(config.as_deref())?;
                    let rec = io::run_solve(&cfg)?;
                    emit_run(&Envelope::new(&cfg, &rec), format, out.as_deref())?;
                }
            }
            Ok(Status::Pass)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        Error::Config(_)
        | Error::Syntax { .. }
        | Error::Domain(_)
        | Error::Admissibility(_)
        | Error::Resource(_)
        | Error::Json(_) => 2,
        Error::BlowUp { .. } | Error::Numeric(_) => 3,
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("DGBO_THREADS") {
        match v.parse::<usize>() {
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => {
                eprintln!("DGBO_THREADS must be a nonnegative integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => {
            eprintln!("one or more checks failed");
            ExitCode::from(4)
        }
        Ok(Status::BlowUp) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
