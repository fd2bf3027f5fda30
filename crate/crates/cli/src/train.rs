//! Parallel CEM training. Results equal the sequential trainer bit for bit:
//! each member's episode seeds depend only on its indices, and returns are
//! collected in member order.

use std::io::Write;
use std::path::{Path, PathBuf};

use glasshouse_core::control::cem::{cem_train_with, evaluate_member, IterationStats};
use glasshouse_core::{CemConfig, CemOutcome, Env, PolicyParams};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

pub fn cem_train_parallel(env: &Env, config: &CemConfig, threads: usize) -> Result<CemOutcome> {
    let pool = thread_pool(threads)?;
    let template = PolicyParams::zeros(&env.config().observation);
    let out = cem_train_with(env, config, |pop, it| {
        pool.install(|| {
            pop.par_iter()
                .enumerate()
                .map_init(
                    || env.clone(),
                    |e, (m, theta)| evaluate_member(e, &template, theta, config, it, m),
                )
                .collect()
        })
    })?;
    Ok(out)
}

/// `<dir>/<stem><suffix>` next to `path`, e.g. `runs.csv` → `runs_aggregate.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub const CURVE_HEADER: [&str; 4] = ["iteration", "mean_return", "max_return", "elite_mean_return"];

pub fn write_curve<W: Write>(out: W, curve: &[IterationStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for s in curve {
        w.write_record([
            s.iteration.to_string(),
            s.mean_return.to_string(),
            s.max_return.to_string(),
            s.elite_mean_return.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<curve>", e))
}
