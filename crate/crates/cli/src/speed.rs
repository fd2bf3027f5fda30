//! Steps-per-second benchmark with the rule-based controller in the loop.

use std::sync::{Arc, Barrier};
use std::time::Instant;

use glasshouse_core::{Controller, Env, EnvConfig, RuleBasedController, WeatherSeries};
use serde::Serialize;

use crate::error::{Error, Result};

/// Shortest run accepted, so the figure reflects a warm loop.
pub const MIN_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Throughput {
    pub threads: usize,
    pub steps: usize,
    pub seconds: f64,
    pub steps_per_sec: f64,
    pub steps_per_sec_per_core: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedReport {
    pub method: String,
    pub substeps: u32,
    pub single: Throughput,
    /// Present when more than one thread was requested.
    pub parallel: Option<Throughput>,
}

/// Runs `n_steps` steps on one prepared environment, resetting at episode ends.
fn drive(env: &mut Env, n_steps: usize, seed: u64) -> Result<()> {
    let mut ctrl = RuleBasedController::default();
    let mut episode = 0;
    let mut obs = env.reset(seed)?;
    for _ in 0..n_steps {
        let a = ctrl.act(&env.context(&obs))?;
        let r = env.step(&a)?;
        obs = if r.truncated {
            episode += 1;
            env.reset(seed + episode)?
        } else {
            r.observation
        };
    }
    Ok(())
}

fn throughput(threads: usize, steps_each: usize, seconds: f64) -> Throughput {
    let steps = threads * steps_each;
    let steps_per_sec = steps as f64 / seconds;
    Throughput {
        threads,
        steps,
        seconds,
        steps_per_sec,
        steps_per_sec_per_core: steps_per_sec / threads as f64,
    }
}

/// Single-thread measurement, then (if `threads > 1`) `threads` independent
/// environments on as many OS threads. Environment construction is excluded.
pub fn measure(config: &EnvConfig, weather: Arc<WeatherSeries>, n_steps: usize, threads: usize) -> Result<SpeedReport> {
    if n_steps < MIN_STEPS {
        return Err(Error::Invalid(format!("speed needs at least {MIN_STEPS} steps, got {n_steps}")));
    }
    let mut env = Env::new(config.clone(), weather.clone())?;
    let t0 = Instant::now();
    drive(&mut env, n_steps, config.seed)?;
    let single = throughput(1, n_steps, t0.elapsed().as_secs_f64());

    let parallel = if threads > 1 {
        let envs = (0..threads)
            .map(|_| Env::new(config.clone(), weather.clone()))
            .collect::<glasshouse_core::Result<Vec<_>>>()?;
        let barrier = Barrier::new(threads + 1);
        let seconds = std::thread::scope(|s| -> Result<f64> {
            let handles: Vec<_> = envs
                .into_iter()
                .enumerate()
                .map(|(i, mut env)| {
                    let barrier = &barrier;
                    s.spawn(move || {
                        barrier.wait();
                        drive(&mut env, n_steps, config.seed + 1_000_000 * i as u64)
                    })
                })
                .collect();
            barrier.wait();
            let t0 = Instant::now();
            for h in handles {
                h.join().map_err(|_| Error::Invalid("benchmark thread panicked".into()))??;
            }
            Ok(t0.elapsed().as_secs_f64())
        })?;
        Some(throughput(threads, n_steps, seconds))
    } else {
        None
    };
    Ok(SpeedReport {
        method: format!("{:?}", config.integrator.method).to_lowercase(),
        substeps: config.integrator.substeps,
        single,
        parallel,
    })
}
