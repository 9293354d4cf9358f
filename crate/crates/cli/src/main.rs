use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use permzne_cli::{cmd_scaling, cmd_sweep, cmd_vqe, cmd_zne, exit, DepthUnreachable, ExperimentConfig};

#[derive(Parser)]
#[command(name = "permzne", version, about = "Zero-noise extrapolation over qubit permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Optimise the ansatz, optionally searching for the depth.
    Vqe(Common),
    /// Extrapolate over a permutation set.
    Zne(Common),
    /// Repeat the extrapolation for a list of q_max values.
    Sweep(Common),
    /// Error statistics over repeated permutation pools.
    Scaling(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (Command::Vqe(common) | Command::Zne(common) | Command::Sweep(common) | Command::Scaling(common)) = &cli.command;

    let mut config = match ExperimentConfig::load(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    if let Some(out) = &common.out {
        config.output_dir = Some(out.clone());
    }
    let out = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    if let Some(jobs) = common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(exit::FAILURE as u8);
        }
    }

    let result = match &cli.command {
        Command::Vqe(_) => cmd_vqe(&config, &out).map(drop),
        Command::Zne(c) => cmd_zne(&config, &out, c.svg).map(drop),
        Command::Sweep(c) => cmd_sweep(&config, &out, c.svg).map(drop),
        Command::Scaling(_) => cmd_scaling(&config, &out).map(drop),
    };
    match result {
        Ok(()) => {
            log::info!("results written to {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) if e.is::<DepthUnreachable>() => {
            eprintln!("error: {e}");
            ExitCode::from(exit::DEPTH_UNREACHABLE as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::FAILURE as u8)
        }
    }
}
