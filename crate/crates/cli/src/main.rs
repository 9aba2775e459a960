use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collide_cli::run::{execute, Command, Invocation};

#[derive(Parser)]
#[command(
    name = "collide",
    version,
    about = "Collision times of two small-noise diffusions"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Wells, theta, eps0, lambda0, Hbar0 and the h_eps table.
    Landscape(Common),
    /// Collision-time sweep over the sigma grid.
    Sweep(Common),
    /// Linearized coupling and empirical-mean confinement.
    Couple(Common),
    /// Single-diffusion exit from a ball.
    ExitCheck(Common),
    /// Check every assumption of a config without simulating.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(short, long)]
    config: PathBuf,
    /// Overrides `sim.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Keep every k-th state of each replicate in trajectories.csv (0 = off).
    #[arg(long, default_value_t = 0)]
    thin: u64,
    /// Write the manifest only.
    #[arg(long)]
    dry_run: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Sub::Landscape(c) => (Command::Landscape, c),
        Sub::Sweep(c) => (Command::Sweep, c),
        Sub::Couple(c) => (Command::Couple, c),
        Sub::ExitCheck(c) => (Command::ExitCheck, c),
        Sub::Validate(c) => (Command::Validate, c),
    };
    let inv = Invocation {
        command,
        config: c.config,
        seed: c.seed,
        threads: c
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        out_dir: c.out_dir,
        thin: c.thin,
        dry_run: c.dry_run,
    };
    match execute(&inv) {
        Ok(summary) => {
            let _ = writeln!(std::io::stdout().lock(), "{:#}", summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr().lock(), "{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
