//! Configuration, parallel campaigns and result files for `ldmc`.

pub mod campaign;
pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use ldmc_core::reliability::{estimate_pf, PfEstimate};

use crate::campaign::CampaignError;
use crate::config::{CampaignConfig, ConfigError};
use crate::output::CampaignMeta;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error("{0}")]
    Model(#[from] ldmc_core::Error),
    #[error("cannot write results: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug)]
pub struct RunSummary {
    pub estimate: PfEstimate,
    pub output_dir: PathBuf,
    pub wall_time_s: f64,
}

/// Runs the campaign described by `config` and writes its result files.
pub fn run(config: &CampaignConfig, workers: Option<usize>) -> Result<RunSummary, RunError> {
    config.validate()?;
    let campaign = config
        .to_campaign()
        .map_err(|e| ConfigError::Invalid(vec![config::Violation { path: "model".into(), message: e }]))?;
    log::info!(
        "campaign `{}`: {} samples, corrosion {}, seed {}",
        config.name,
        config.simulations,
        config.corrosion,
        config.seed
    );
    let start = Instant::now();
    let tally = campaign::run_parallel(&campaign, config.simulations, workers)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let estimate = estimate_pf(&tally)?;
    let meta = CampaignMeta {
        name: config.name.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        n_sims: tally.n_simulations,
        years: config.years,
        time_step: config.time_step,
        corrosion: config.corrosion.to_string(),
        workers: workers.unwrap_or_else(rayon::current_num_threads),
        wall_time_s,
    };
    output::write_all(&config.output_dir, &config.hinges(), &estimate, &meta)?;
    log::info!("wrote results to {} in {:.1} s", config.output_dir.display(), wall_time_s);
    Ok(RunSummary { estimate, output_dir: config.output_dir.clone(), wall_time_s })
}
