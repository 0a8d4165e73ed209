use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rds_cli::{exit_code, generate_mesh, run_file, Mode, ERROR_EXIT};

#[derive(Parser)]
#[command(
    name = "rdsolve",
    version,
    about = "Steady residual distribution solves and verification audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and run the audits listed in the config.
    Run { config: PathBuf },
    /// Solve and run every applicable audit.
    Audit { config: PathBuf },
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Write a structured mesh of the unit square.
    Gen { nx: usize, ny: usize, out: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run(&config, Mode::Run),
        Command::Audit { config } => run(&config, Mode::Audit),
        Command::Mesh {
            command: MeshCommand::Gen { nx, ny, out },
        } => generate_mesh(nx, ny, &out).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT as u8)
        }
    }
}

fn run(config: &std::path::Path, mode: Mode) -> Result<i32, rds_cli::CliError> {
    let outcome = run_file(config, mode)?;
    for a in &outcome.audits {
        println!(
            "{} {}: {}",
            if a.pass { "PASS" } else { "FAIL" },
            a.audit.name(),
            a.summary
        );
    }
    eprintln!(
        "{} iterations, converged = {}, {:.3} s",
        outcome.solve.iterations,
        outcome.solve.converged,
        outcome.solve.wall_time.as_secs_f64()
    );
    Ok(exit_code(&outcome))
}
