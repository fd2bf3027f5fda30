//! Uncertainty sweep: every controller at every δ for `n_runs` seeded episodes.

use std::io::Write;
use std::sync::Arc;

use glasshouse_core::env::reward::EpisodeMetrics;
use glasshouse_core::{Env, EnvConfig, WeatherSeries};
use rayon::prelude::*;

use crate::controllers::AnyController;
use crate::error::{Error, Result};
use crate::train::thread_pool;

/// Default δ grid for sweeps.
pub const DEFAULT_DELTAS: [f64; 7] = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub deltas: Vec<f64>,
    pub n_runs: usize,
    /// Run `i` uses episode seed `base_seed + i`.
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub controller: String,
    pub delta: f64,
    pub run: usize,
    pub seed: u64,
    pub metrics: EpisodeMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub controller: String,
    pub delta: f64,
    pub n_runs: usize,
    pub cum_reward: Stat,
    pub cum_epi: Stat,
    pub cum_penalty: Stat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by (controller, δ, run).
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

pub fn run_sweep(
    base: &EnvConfig,
    weather: Arc<WeatherSeries>,
    controllers: &[(String, AnyController)],
    spec: &SweepSpec,
    threads: usize,
) -> Result<SweepResult> {
    if spec.n_runs == 0 {
        return Err(Error::Invalid("sweep needs at least one run".into()));
    }
    if spec.deltas.is_empty() || controllers.is_empty() {
        return Err(Error::Invalid("sweep needs at least one delta and one controller".into()));
    }
    let envs = spec
        .deltas
        .iter()
        .map(|&delta| {
            let mut cfg = base.clone();
            cfg.uncertainty.delta = delta;
            Env::new(cfg, weather.clone())
        })
        .collect::<glasshouse_core::Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize, usize)> = (0..controllers.len())
        .flat_map(|c| (0..spec.deltas.len()).flat_map(move |d| (0..spec.n_runs).map(move |r| (c, d, r))))
        .collect();
    let pool = thread_pool(threads)?;
    let runs = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, d, r)| {
                let mut env = envs[d].clone();
                let mut ctrl = controllers[c].1.clone();
                let seed = spec.base_seed + r as u64;
                let metrics = env.run_episode(&mut ctrl, seed, |_| {})?;
                Ok(RunRecord {
                    controller: controllers[c].0.clone(),
                    delta: spec.deltas[d],
                    run: r,
                    seed,
                    metrics,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let aggregates = aggregate(&runs, spec.n_runs);
    Ok(SweepResult { runs, aggregates })
}

/// Groups consecutive blocks of `n_runs` records.
pub fn aggregate(runs: &[RunRecord], n_runs: usize) -> Vec<Aggregate> {
    runs.chunks(n_runs)
        .map(|block| {
            let col = |f: fn(&EpisodeMetrics) -> f64| block.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>();
            Aggregate {
                controller: block[0].controller.clone(),
                delta: block[0].delta,
                n_runs: block.len(),
                cum_reward: Stat::of(&col(|m| m.cum_reward)),
                cum_epi: Stat::of(&col(|m| m.cum_epi_raw)),
                cum_penalty: Stat::of(&col(|m| m.cum_penalty)),
            }
        })
        .collect()
}

pub const RUNS_HEADER: [&str; 6] = ["controller", "delta", "run", "cum_reward", "cum_epi", "cum_penalty"];

pub const AGGREGATE_HEADER: [&str; 9] = [
    "controller",
    "delta",
    "n_runs",
    "mean_cum_reward",
    "std_cum_reward",
    "mean_cum_epi",
    "std_cum_epi",
    "mean_cum_penalty",
    "std_cum_penalty",
];

pub fn write_runs<W: Write>(out: W, runs: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for r in runs {
        w.write_record([
            r.controller.clone(),
            r.delta.to_string(),
            r.run.to_string(),
            r.metrics.cum_reward.to_string(),
            r.metrics.cum_epi_raw.to_string(),
            r.metrics.cum_penalty.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<sweep runs>", e))
}

pub fn write_aggregates<W: Write>(out: W, aggs: &[Aggregate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for a in aggs {
        w.write_record([
            a.controller.clone(),
            a.delta.to_string(),
            a.n_runs.to_string(),
            a.cum_reward.mean.to_string(),
            a.cum_reward.std.to_string(),
            a.cum_epi.mean.to_string(),
            a.cum_epi.std.to_string(),
            a.cum_penalty.mean.to_string(),
            a.cum_penalty.std.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<sweep aggregate>", e))
}
