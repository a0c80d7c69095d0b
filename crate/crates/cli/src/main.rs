use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use degindex_cli::{config, ConfigError, Outcome, EXIT_CONFIG};

/// Ring indices, degeneracy indices and phase portraits of planar flows
/// `f·ẋ = JE`.
#[derive(Debug, Parser)]
#[command(name = "degindex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rings, ring indices and zeros in the plane, as JSON.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Total degeneracy index over the sphere, as JSON.
    PhCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Phase portrait as SVG.
    Portrait {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Admissibility of a one-parameter family, as JSON.
    Homotopy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 21)]
        samples: usize,
    },
    /// Trajectory from a starting point, as JSON.
    Integrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x0: [f64; 2],
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else { return Err(format!("expected `a,b`, got `{s}`")) };
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("not a number: `{t}`"));
    Ok([num(a)?, num(b)?])
}

fn run(command: Command) -> Result<Outcome, ConfigError> {
    let load = |p: &Path| config::load(p);
    match command {
        Command::Analyze { config } => degindex_cli::analyze(&load(&config)?),
        Command::PhCheck { config } => degindex_cli::ph_check(&load(&config)?),
        Command::Portrait { config, out } => degindex_cli::portrait(&load(&config)?, &out),
        Command::Homotopy { config, samples } => degindex_cli::homotopy(&load(&config)?, samples),
        Command::Integrate { config, x0, t_max, tol } => degindex_cli::integrate_from(&load(&config)?, x0, t_max, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_CONFIG as u8);
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
