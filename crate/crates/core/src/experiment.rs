//! The scatter experiment: many channels between low-entropy and uniform
//! weights, each scored by averaged discord and distortion over a state batch.
//!
//! Channel ids run `a`-major: id `c < a_grid · wdown_per_a` uses grid value
//! `a = linspace(0, 1, a_grid)[c / wdown_per_a]` and draws its own `℘↓`.
//! When included, the identity channel takes the last id.
//!
//! Channel `c` owns the ChaCha8 substream `(seed, stream = c)`, so any subset
//! of ids can be recomputed in any order with identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    assemble_channel, identity_channel, interpolate_weights, low_entropy_weights, uniform_weights, Channel,
    LowEntropyRule,
};
use crate::error::{Error, Result};
use crate::estimators::{estimate_channel, PermutationConvention};
use crate::permutations::{check_order, PermutationTable};
use crate::states::{state_batch, PriorKind, StatePrior};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "DISCORDLAB_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub m: usize,
    pub prior: PriorKind,
    pub a_grid: usize,
    pub wdown_per_a: usize,
    pub states: usize,
    pub seed: u64,
    pub include_identity: bool,
    #[serde(default)]
    pub convention: PermutationConvention,
    #[serde(default)]
    pub low_entropy_rule: LowEntropyRule,
}

impl ExperimentConfig {
    /// The reference sweep: 100 values of `a`, 60 low-entropy draws each, 100 states per channel.
    pub fn reference(m: usize, prior: PriorKind, seed: u64) -> Self {
        Self {
            m,
            prior,
            a_grid: 100,
            wdown_per_a: 60,
            states: 100,
            seed,
            include_identity: true,
            convention: PermutationConvention::default(),
            low_entropy_rule: LowEntropyRule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.m)?;
        if self.m < 2 {
            return Err(Error::Contract("experiments need message size M ≥ 2".into()));
        }
        if self.a_grid == 0 || self.wdown_per_a == 0 || self.states == 0 {
            return Err(Error::Contract("a_grid, wdown_per_a and states must all be positive".into()));
        }
        Ok(())
    }

    pub fn grid_channels(&self) -> usize {
        self.a_grid * self.wdown_per_a
    }

    pub fn total_channels(&self) -> usize {
        self.grid_channels() + usize::from(self.include_identity)
    }

    /// Interpolation weight of channel `id`; `None` for the identity channel.
    pub fn a_value(&self, id: usize) -> Option<f64> {
        if id >= self.grid_channels() {
            return None;
        }
        let k = id / self.wdown_per_a;
        Some(if self.a_grid == 1 { 0.0 } else { k as f64 / (self.a_grid - 1) as f64 })
    }
}

/// One channel's row of the scatter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub channel_id: usize,
    pub a: Option<f64>,
    pub weight_entropy: f64,
    pub avg_discord: f64,
    pub avg_distortion: f64,
    pub n_states: usize,
    /// Most frequent distortion-minimizing table index over the batch.
    pub argmin_mode: usize,
}

fn substream(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// Builds channel `id` and its state batch from the channel's substream.
pub fn channel_for(
    config: &ExperimentConfig,
    table: &PermutationTable,
    id: usize,
) -> Result<(Channel, Vec<crate::hadamard::JointState>)> {
    if id >= config.total_channels() {
        return Err(Error::Contract(format!("channel id {id} out of range 0..{}", config.total_channels())));
    }
    let mut rng = substream(config.seed, id);
    let channel = match config.a_value(id) {
        Some(a) => {
            let down = low_entropy_weights(config.m, config.low_entropy_rule, &mut rng)?;
            let up = uniform_weights(config.m)?;
            assemble_channel(&interpolate_weights(&down, &up, a)?, table)?
        }
        None => identity_channel(table),
    };
    let prior = StatePrior::with_grid_size(config.prior, config.states);
    let batch = state_batch(&prior, config.m, &mut rng)?;
    Ok((channel, batch))
}

/// Scores one channel.
pub fn run_channel(config: &ExperimentConfig, table: &PermutationTable, id: usize) -> Result<ScatterPoint> {
    let (channel, batch) = channel_for(config, table, id)?;
    let est = estimate_channel(&channel, &batch, table, config.convention)?;
    Ok(ScatterPoint {
        channel_id: id,
        a: config.a_value(id),
        weight_entropy: channel.entropy(),
        avg_discord: est.avg_discord,
        avg_distortion: est.avg_distortion,
        n_states: est.n_states,
        argmin_mode: est.distortion_argmin_mode(),
    })
}

/// Thread count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|n: &usize| *n > 0)
}

/// Scores the given channel ids in parallel, returning points in the order of `ids`.
///
/// `progress` is called once per finished channel.
pub fn run_channels<F>(config: &ExperimentConfig, ids: &[usize], progress: F) -> Result<Vec<ScatterPoint>>
where
    F: Fn(&ScatterPoint) + Sync,
{
    config.validate()?;
    let table = PermutationTable::reverse_lex(config.m)?;
    let work = || {
        ids.par_iter()
            .map(|&id| {
                let point = run_channel(config, &table, id)?;
                progress(&point);
                Ok(point)
            })
            .collect::<Result<Vec<_>>>()
    };
    match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Contract(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Scores every channel of the sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ScatterPoint>> {
    let ids: Vec<usize> = (0..config.total_channels()).collect();
    run_channels(config, &ids, |_| {})
}
