//! Parallel execution of a Monte Carlo campaign.

use std::sync::atomic::{AtomicU64, Ordering};

use ldmc_core::reliability::{Campaign, FailureTally};
use rayon::prelude::*;

/// Samples handed to a worker at a time.
const CHUNK: u64 = 32;

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("sample {index}: {source}")]
    Sample { index: u64, source: ldmc_core::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn run_chunk(campaign: &Campaign, start: u64, end: u64) -> Result<FailureTally, CampaignError> {
    let mut tally = FailureTally::new(campaign.settings.years, campaign.n_hinges());
    for index in start..end {
        match campaign.run_sample(index).map_err(|source| CampaignError::Sample { index, source })? {
            Some(life) => tally.record(&life),
            None => tally.record_survivor(),
        }
    }
    Ok(tally)
}

/// Runs samples `0..n` on `workers` threads (all cores when `None`).
///
/// Each sample draws from its own stream and tallies are merged by integer
/// addition, so the result is independent of the worker count.
pub fn run_parallel(campaign: &Campaign, n: u64, workers: Option<usize>) -> Result<FailureTally, CampaignError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build()?;
    let chunks = n.div_ceil(CHUNK);
    let done = AtomicU64::new(0);
    let step = (chunks / 10).max(1);
    pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let tally = run_chunk(campaign, c * CHUNK, ((c + 1) * CHUNK).min(n));
                let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
                if finished.is_multiple_of(step) || finished == chunks {
                    log::info!("{} / {} samples", (finished * CHUNK).min(n), n);
                }
                tally
            })
            .try_reduce(
                || FailureTally::new(campaign.settings.years, campaign.n_hinges()),
                |mut a, b| {
                    a.merge(&b);
                    Ok(a)
                },
            )
    })
}
