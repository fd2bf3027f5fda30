//! JSON-lines trajectory files and the step-info JSON shape.
//!
//! One `{"record":"step",...}` line per step, then one `{"record":"summary",...}`:
//!
//! ```text
//! {"record":"step","k":0,"x":{"t_air":18.1,...},"u":{...},"d":{...},"reward":{"epi_raw":...},"multipliers":[...]}
//! {"record":"summary","controller":"rule_based","seed":0,"metrics":{"cum_reward":...}}
//! ```

use std::io::Write;

use glasshouse_core::env::reward::EpisodeMetrics;
use glasshouse_core::{Controller, Controls, Disturbance, Env, RewardBreakdown, State, StepInfo, StepResult};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record<'a> {
    Step {
        k: usize,
        x: &'a State,
        u: &'a Controls,
        d: &'a Disturbance,
        reward: &'a RewardBreakdown,
        multipliers: &'a [f64],
    },
    Summary {
        controller: &'a str,
        seed: u64,
        metrics: &'a EpisodeMetrics,
    },
}

/// Info payload of one step with every field named, for foreign-language wrappers.
#[derive(Debug, Serialize)]
pub struct InfoView<'a> {
    pub step: usize,
    pub reward: &'a RewardBreakdown,
    pub state: &'a State,
    pub controls: &'a Controls,
    pub disturbance: &'a Disturbance,
    pub multipliers: &'a [f64],
}

impl<'a> From<&'a StepInfo> for InfoView<'a> {
    fn from(i: &'a StepInfo) -> Self {
        Self {
            step: i.step,
            reward: &i.reward,
            state: &i.state,
            controls: &i.controls,
            disturbance: &i.disturbance,
            multipliers: &i.multipliers,
        }
    }
}

pub fn info_json(info: &StepInfo) -> Result<String> {
    Ok(serde_json::to_string(&InfoView::from(info))?)
}

pub struct TrajectoryWriter<W: Write> {
    out: W,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    fn line(&mut self, r: &Record<'_>) -> Result<()> {
        serde_json::to_writer(&mut self.out, r)?;
        self.out.write_all(b"\n").map_err(|e| Error::io("<trajectory>", e))
    }

    pub fn step(&mut self, r: &StepResult) -> Result<()> {
        let i = &r.info;
        self.line(&Record::Step {
            k: i.step,
            x: &i.state,
            u: &i.controls,
            d: &i.disturbance,
            reward: &i.reward,
            multipliers: &i.multipliers,
        })
    }

    pub fn summary(&mut self, controller: &str, seed: u64, metrics: &EpisodeMetrics) -> Result<()> {
        self.line(&Record::Summary {
            controller,
            seed,
            metrics,
        })
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush().map_err(|e| Error::io("<trajectory>", e))?;
        Ok(self.out)
    }
}

/// Runs one episode and writes its trajectory.
pub fn rollout<C, W>(env: &mut Env, controller: &mut C, label: &str, seed: u64, out: W) -> Result<EpisodeMetrics>
where
    C: Controller + ?Sized,
    W: Write,
{
    let mut w = TrajectoryWriter::new(out);
    let mut failed = None;
    let metrics = env.run_episode(controller, seed, |r| {
        if failed.is_none() {
            if let Err(e) = w.step(r) {
                failed = Some(e);
            }
        }
    })?;
    if let Some(e) = failed {
        return Err(e);
    }
    w.summary(label, seed, &metrics)?;
    w.finish()?;
    Ok(metrics)
}
