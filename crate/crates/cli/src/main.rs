//! `shg2d`: config-driven runs of the second-harmonic solver and closed forms.
//!
//! ```text
//! shg2d <analytic|solve|compare|scan|symmetry> --config run.json [--out result.json] [--grid-n N] [--format json|csv]
//! ```
//!
//! Exit status is 0 on success, 2 for configuration errors and 3 for
//! numerical failures. Numerical failures also print a JSON error object.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::{CommandError, Report};
use config::{Format, RunConfig};
use output::Envelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Closed-form fields, first-order amplitudes and predictions.
    Analytic,
    /// Numeric pipeline and multipole spectrum.
    Solve,
    /// Closed forms and numerics side by side, with per-mode errors.
    Compare,
    /// Resonance sweep over the offsets in the scan block.
    Scan,
    /// Dihedral symmetry of the boundary and the background.
    Symmetry,
}

#[derive(Debug, Parser)]
#[command(
    name = "shg2d",
    version,
    about = "Second-harmonic generation from 2D nanoparticle cross-sections"
)]
struct Cli {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides the config. Standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature nodes; overrides the config.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Output format; overrides the config. `csv` applies to scans only.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn config_failure(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("shg2d: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SHG2D_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("SHG2D_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn emit(path: Option<&PathBuf>, contents: &str) -> std::io::Result<()> {
    match path {
        Some(p) => output::write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> ExitCode {
    if let Err(e) = init_threads() {
        return config_failure(e);
    }
    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => return config_failure(e),
    };
    if let Some(n) = cli.grid_n {
        cfg.grid_n = n;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    if cfg.format == Format::Csv && cli.command != Command::Scan {
        return config_failure("csv output is only available for scan");
    }
    let setup = match cfg.validate() {
        Ok(s) => s,
        Err(e) => return config_failure(e),
    };
    let result = match cli.command {
        Command::Analytic => commands::analytic(&setup).map(Report::Analytic),
        Command::Solve => commands::solve(&cfg, &setup).map(Report::Solve),
        Command::Compare => commands::compare(&cfg, &setup).map(Report::Compare),
        Command::Scan => commands::scan(&cfg, &setup).map(Report::Scan),
        Command::Symmetry => Ok(Report::Symmetry(commands::symmetry(&setup))),
    };
    let report = match result {
        Ok(r) => r,
        Err(CommandError::Config(e)) => return config_failure(e),
        Err(CommandError::Numeric(e)) => {
            eprintln!("shg2d: {e}");
            print!("{}", output::error_json(&e));
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    let csv = match (&report, cfg.format) {
        (Report::Scan(s), Format::Csv) => Some(output::scan_csv(s).expect("in-memory csv")),
        _ => None,
    };
    let json = output::to_sorted_json(&Envelope::new(report)).expect("report serializes");
    let written = match (csv, cfg.output.as_ref()) {
        (Some(csv), Some(path)) => {
            let companion = path.with_extension("json");
            if companion == *path {
                return config_failure("csv output path must not end in .json");
            }
            emit(Some(path), &csv).and_then(|_| emit(Some(&companion), &json))
        }
        (Some(csv), None) => emit(None, &csv),
        (None, path) => emit(path, &json),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shg2d: cannot write output: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli)
}
