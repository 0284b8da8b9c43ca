use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cm_entropy::cli::config::ExperimentConfig;
use cm_entropy::cli::{tasks, verify};
use cm_entropy::submanifold::catalog::catalog;

/// Numerical laboratory for Gaussian densities, entropies, and curvature
/// expansions of immersed submanifolds in Euclidean and hyperbolic space.
///
/// Thread count for the parallel quadrature and search stages is taken
/// from the RAYON_NUM_THREADS environment variable; results do not depend
/// on it.
#[derive(Parser)]
#[command(name = "cm-entropy", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Run a named verification suite: kernels, expansions, entropy, or all.
    Verify { suite: String },
    /// List the built-in shapes and their parameters.
    Catalog,
}

fn run(path: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    };
    let cfg = match ExperimentConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match tasks::run(&cfg) {
        Ok(()) => {
            println!("wrote {}", cfg.output_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run_verify(suite: &str) -> ExitCode {
    match verify::suite(suite) {
        Ok(checks) => {
            print!("{}", verify::render(&checks));
            if checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run(&config),
        Command::Verify { suite } => run_verify(&suite),
        Command::Catalog => {
            for entry in catalog() {
                println!("{:<22} {:<32} {}", entry.name, entry.signature, entry.description);
            }
            ExitCode::SUCCESS
        }
    }
}
