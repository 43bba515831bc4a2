use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use convexlab_cli::{list_tasks, run, EXIT_USAGE};

/// Thread count for the data-parallel kernels.
const THREADS_ENV: &str = "CONVEXLAB_THREADS";

#[derive(Parser)]
#[command(name = "convexlab", version, about = "Verification and scan tasks for chart Riemannian metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task described by a TOML config
    Run {
        config: PathBuf,
        /// overrides the config's output directory
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the task catalog with parameter schemas
    ListTasks,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => convexlab::exec::init_threads(n),
            _ => {
                eprintln!("usage error: {THREADS_ENV} must be a positive integer, got {n:?}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
    }
    match cli.command {
        Command::ListTasks => {
            print!("{}", list_tasks());
            ExitCode::SUCCESS
        }
        Command::Run { config, output } => {
            let r = run(&config, output.as_deref());
            eprintln!("{}", r.message);
            ExitCode::from(r.code as u8)
        }
    }
}
