use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use laxlab_cli::{run_path, RunError, RunOptions};

/// Run finite-difference stability, convergence and round-off experiments.
#[derive(Debug, Parser)]
#[command(name = "laxlab", version)]
struct Args {
    /// Experiment config (TOML, one table per experiment).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; the LAXLAB_OUT environment variable takes precedence.
    #[arg(long, default_value = "laxlab-out")]
    out: PathBuf,

    /// Worker threads for independent experiments and sweep cells.
    #[arg(long)]
    jobs: Option<usize>,

    /// Seed for random probes that do not carry their own.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out_dir = std::env::var_os("LAXLAB_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or(args.out);
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let options = RunOptions {
        out_dir,
        jobs,
        seed: args.seed,
    };
    match run_path(&args.config, &options) {
        Ok(summary) => {
            for file in &summary.csv_files {
                println!("wrote {}", file.display());
            }
            println!("wrote {}", summary.summary_file.display());
            ExitCode::SUCCESS
        }
        Err(err @ RunError::Config(_)) => {
            eprintln!("laxlab: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("laxlab: {err}");
            ExitCode::FAILURE
        }
    }
}
