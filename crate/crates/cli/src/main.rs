use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use casimir_cli::config::{parse_config, Format};
use casimir_cli::dos::{dos_scan, write_dos_csv};
use casimir_cli::{run_sweep, write_table};
use clap::{Parser, Subcommand};

const CONFIG_ERROR: u8 = 2;
const CONVERGENCE_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "casimir", version, about = "Casimir pressure between planar slabs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pressure over the configured separation sweep.
    Run {
        config: PathBuf,
        /// Output file; overrides `output.path`. Stdout if neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `output.format`.
        #[arg(long)]
        format: Option<Format>,
        /// Relative tolerance; overrides `quadrature.rel_tol`.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Density of states per unit k^2 from the `[dos]` section.
    Dos {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, format, tol } => run(config, out, format, tol),
        Command::Dos { config, out } => dos(config, out),
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, format: Option<Format>, tol: Option<f64>) -> ExitCode {
    let mut cfg = match parse_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    if let Some(t) = tol {
        cfg.quadrature.rel_tol = t;
        if let Err(e) = cfg.quadrature.validate() {
            eprintln!("error: --tol: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    }
    if cfg.separations.is_empty() {
        eprintln!("error: `sweep`: missing section");
        return ExitCode::from(CONFIG_ERROR);
    }
    let format = format.unwrap_or(cfg.format);
    let out = out.or_else(|| cfg.output.clone());

    let (table, problems) = run_sweep(&cfg);
    for p in &problems {
        eprintln!("warning: {p}");
    }
    if let Err(e) = write_table(&table, format, out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if table.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CONVERGENCE_FAILURE)
    }
}

fn dos(config: PathBuf, out: Option<PathBuf>) -> ExitCode {
    let cfg = match parse_config(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let Some(dcfg) = &cfg.dos else {
        eprintln!("error: `dos`: missing section");
        return ExitCode::from(CONFIG_ERROR);
    };
    let rows = match dos_scan(&cfg.slab1.reflection, &cfg.slab2.reflection, dcfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONVERGENCE_FAILURE);
        }
    };
    let written = match out.or_else(|| dcfg.path.clone()) {
        Some(p) => match File::create(&p) {
            Ok(f) => write_dos_csv(&rows, BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::FAILURE;
            }
        },
        None => write_dos_csv(&rows, io::stdout().lock()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
