use clap::{Parser, Subcommand, ValueEnum};
use magspec::exact::{circle_lowest, product_spectrum};
use magspec::experiments::scenarios::steps_csv;
use magspec::experiments::{run_scenario, sweep, verify_steps_for, Report, ScenarioConfig, SweepParam};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "magspec", version, about = "Low spectrum of magnetic Neumann Laplacians and its geometric bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectra.
    Spectrum {
        #[command(subcommand)]
        kind: ExactKind,
    },
    /// Runs the scenario of a configuration file.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs the scenario for equispaced values of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: Param,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Checks the three monotonicity facts behind the annulus bound.
    VerifySteps {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExactKind {
    /// Circle of length L: 4π²(k − Φ)²/L².
    Circle {
        #[arg(long)]
        length: f64,
        #[arg(long)]
        flux: f64,
        #[arg(long, default_value_t = 4)]
        modes: usize,
    },
    /// Product cylinder [0, a] × S¹_L: π²h²/a² + 4π²(k − Φ)²/L².
    Product {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        flux: f64,
        #[arg(long, default_value_t = 4)]
        modes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Param {
    Phi,
    Eps,
}

fn emit(report: &Report, cfg: &ScenarioConfig, x: &str) -> magspec::Result<()> {
    let csv = report.to_csv();
    match &cfg.output.csv {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(gp) = &cfg.output.gnuplot {
        let data = cfg.output.csv.as_deref().unwrap_or(Path::new("data.csv"));
        std::fs::write(gp, report.gnuplot(&data.display().to_string(), x))?;
    }
    Ok(())
}

fn x_column(cfg: &ScenarioConfig) -> &'static str {
    use magspec::experiments::DomainConfig::*;
    match cfg.domain {
        Circle { .. } | Cylinder { .. } | Annulus { .. } => "around",
        _ => "param",
    }
}

fn run(cli: Cli) -> magspec::Result<bool> {
    match cli.command {
        Command::Spectrum { kind } => {
            match kind {
                ExactKind::Circle { length, flux, modes } => {
                    println!("k,lambda");
                    for m in circle_lowest(length, flux, modes) {
                        println!("{},{:.16e}", m.k, m.lambda);
                    }
                }
                ExactKind::Product { a, length, flux, modes } => {
                    println!("h,k,lambda");
                    for m in product_spectrum(a, length, flux, modes) {
                        println!("{},{},{:.16e}", m.h, m.k, m.lambda);
                    }
                }
            }
            Ok(true)
        }
        Command::Solve { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let report = run_scenario(&cfg)?;
            emit(&report, &cfg, x_column(&cfg))?;
            Ok(report.all_pass())
        }
        Command::Sweep { config, param, from, to, steps } => {
            let cfg = ScenarioConfig::load(&config)?;
            let (p, x) = match param {
                Param::Phi => (SweepParam::Phi, "phi"),
                Param::Eps => (SweepParam::Eps, "param"),
            };
            let report = sweep(&cfg, p, from, to, steps)?;
            emit(&report, &cfg, x)?;
            Ok(report.all_pass())
        }
        Command::VerifySteps { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let reports = verify_steps_for(&cfg)?;
            let csv = steps_csv(&reports);
            match &cfg.output.csv {
                Some(path) => std::fs::write(path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(reports.iter().all(|(_, r)| r.all_pass()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("magspec: {e}");
            ExitCode::from(2)
        }
    }
}
