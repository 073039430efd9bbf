use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ldmc::config::{CampaignConfig, CorrosionKind, Overrides};

#[derive(Parser)]
#[command(name = "ldmc", version, about = "Life-cycle reliability of corroded RC frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write the result files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        simulations: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        years: Option<u32>,
        #[arg(long)]
        corrosion: Option<CorrosionKind>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        workers: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        time_step: Option<f64>,
    },
    /// Check a configuration file and list every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LDMC_LOG", "warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match CampaignConfig::load(&config) {
            Ok(c) => {
                println!(
                    "{}: valid ({} nodes, {} elements, {} hinges)",
                    config.display(),
                    c.nodes.len(),
                    c.elements.len(),
                    2 * c.elements.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                ExitCode::FAILURE
            }
        },
        Command::Run { config, simulations, seed, years, corrosion, workers, output_dir, time_step } => {
            let overrides = Overrides { simulations, seed, years, corrosion, output_dir, time_step };
            let result = CampaignConfig::load(&config).and_then(|mut c| c.apply(&overrides).map(|_| c));
            let cfg = match result {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    return ExitCode::FAILURE;
                }
            };
            match ldmc::run(&cfg, workers.map(|w| w as usize)) {
                Ok(summary) => {
                    println!(
                        "Pf(year {}) = {} ± {} ({} samples, {:.1} s) -> {}",
                        cfg.years,
                        summary.estimate.global.last(),
                        summary.estimate.global.std_err.last().copied().unwrap_or(0.0),
                        summary.estimate.n_simulations,
                        summary.wall_time_s,
                        summary.output_dir.display()
                    );
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
