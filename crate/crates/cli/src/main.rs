use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use neumann_cli::commands::{geometry, inequality_scan, run_sweep, verify_remark, REMARK_H};
use neumann_cli::config::{Overrides, RunConfig};
use neumann_cli::{Failure, Status};

/// Neumann p-Laplacian eigenvalues and their p -> infinity limit.
#[derive(Parser)]
#[command(name = "neumann", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diameter, inradius, volume and limit eigenvalues of one domain.
    Geometry {
        /// Domain spec (JSON).
        domain: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve for every exponent of the schedule and check the results.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        h: Option<f64>,
        /// Drop schedule entries above this exponent.
        #[arg(long)]
        p_max: Option<f64>,
    },
    /// Residual scan of u = x1 on the square for lambda in {0.5, 1, 1.3}.
    VerifyRemark {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = REMARK_H)]
        h: f64,
    },
    /// Limit-eigenvalue inequalities over a directory of domain specs.
    InequalityScan {
        suite: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<Status, Failure> {
    match cli.command {
        Command::Geometry { domain, out } => geometry(&domain, &out),
        Command::Sweep {
            config,
            out,
            seed,
            h,
            p_max,
        } => {
            let cfg = RunConfig::load(&config, &Overrides { out, seed, h, p_max })?;
            run_sweep(&cfg)
        }
        Command::VerifyRemark { out, h } => verify_remark(h, &out),
        Command::InequalityScan { suite, out } => inequality_scan(&suite, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
