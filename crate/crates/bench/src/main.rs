use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bilevel_bench::{cmd_gen, cmd_report, cmd_solve, Mode, Scale, MANIFEST_FILE};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bilevel-bench", version, about = "Testbed generation and benchmarking for bilevel-core")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded testbed and its manifest
    Gen {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scale::Desk)]
        scale: Scale,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve every instance in a manifest
    Solve {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Manifest file, or a directory containing manifest.csv
        #[arg(long)]
        manifest: PathBuf,
        /// Per-instance budget in seconds (exact mode)
        #[arg(long, default_value_t = 120.0)]
        time_limit: f64,
        /// Worker threads; 0 uses every core
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Results CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare exact and approximate results
    Report {
        #[arg(long)]
        exact: PathBuf,
        #[arg(long)]
        approx: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen { seed, scale, out } => {
            let rows = cmd_gen(seed, &out, scale)?;
            println!("wrote {} instances to {}", rows.len(), out.display());
        }
        Cmd::Solve {
            mode,
            manifest,
            time_limit,
            workers,
            out,
        } => {
            let manifest = if manifest.is_dir() {
                manifest.join(MANIFEST_FILE)
            } else {
                manifest
            };
            let rows = cmd_solve(mode, &manifest, time_limit, workers, &out)?;
            let failed: Vec<_> = rows.iter().filter(|r| r.is_error()).collect();
            for r in &failed {
                eprintln!("{}: {}", r.id, r.error);
            }
            println!(
                "{} mode: {} instances, {} errors -> {}",
                mode.as_str(),
                rows.len(),
                failed.len(),
                out.display()
            );
            if !failed.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Report { exact, approx, out } => {
            let report = cmd_report(&exact, &approx, &out)?;
            print!("{}", report.summary);
            println!("report written to {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
