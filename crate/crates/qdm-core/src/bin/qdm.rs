use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qdm_core::cli::{run, Command, ModelConfig, RunOptions};
use qdm_core::QdmError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Analyze,
    Fuse,
    Confine,
    Glue,
}

/// Quantum double models with matter: degeneracy, fusion, confinement and gluing.
#[derive(Debug, Parser)]
#[command(name = "qdm", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Largest dimension diagonalized densely.
    #[arg(long)]
    dense_cap: Option<usize>,
}

fn execute(args: &Args) -> Result<String, QdmError> {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| QdmError::config("threads", e.to_string()))?;
    }
    let cfg = ModelConfig::load(&args.config)?;
    let opts = RunOptions { seed: args.seed, dense_cap: args.dense_cap, ..RunOptions::default() };
    let cmd = match args.command {
        Cmd::Analyze => Command::Analyze,
        Cmd::Fuse => Command::Fuse,
        Cmd::Confine => Command::Confine,
        Cmd::Glue => Command::Glue,
    };
    run(cmd, &cfg, &opts)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = execute(&args).and_then(|text| match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| QdmError::config("out", format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
