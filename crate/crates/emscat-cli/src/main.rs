//! Batch driver for the scattering solvers: frequency sweeps with pattern
//! CSV output, pattern comparison, and the solver cost benchmark.

use emscat_cli::run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "emscat",
    about = "Surface-integral-equation scattering solver for homogeneous dielectric bodies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (frequency, solver) pair of a configuration and write
    /// pattern CSVs plus a machine-readable summary.
    Solve {
        /// Run-configuration file (TOML).
        config: PathBuf,
        /// Allow scheduling-dependent parallel reductions. The default
        /// assembly is deterministic either way; this flag only relaxes the
        /// guarantee for future optimizations.
        #[arg(long)]
        fast: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the output directory from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two pattern CSV files on identical direction grids.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Relative L2 tolerance on the complex field samples.
        #[arg(long)]
        tol: f64,
    },
    /// Run the configured solvers once per frequency and report fill/solve
    /// times and accounted matrix memory side by side.
    Bench {
        config: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn setup_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let t = t.max(1);
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("thread pool can only be built once");
        emscat::set_dense_parallelism(t);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve {
            config,
            fast,
            threads,
            out,
        } => {
            setup_threads(threads);
            let _ = fast; // assembly is deterministic in both modes
            match run::run_solve(&config, out.as_deref()) {
                Ok(report) => {
                    println!("{report}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Compare { a, b, tol } => match run::run_compare(&a, &b, tol) {
            Ok(diff) => {
                println!(
                    "max relative difference: {:.6e}\nl2 relative difference:  {:.6e}\ntolerance: {:.6e}",
                    diff.max, diff.l2, tol
                );
                if diff.l2 <= tol {
                    println!("PASS");
                    ExitCode::SUCCESS
                } else {
                    println!("FAIL");
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Bench {
            config,
            threads,
            out,
        } => {
            setup_threads(threads);
            match run::run_bench(&config, out.as_deref()) {
                Ok(report) => {
                    println!("{report}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
