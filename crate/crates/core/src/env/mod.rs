//! Episode environment with reset/step semantics.
//!
//! ```
//! use std::sync::Arc;
//! use glasshouse_core::weather::{synthetic, SyntheticProfile};
//! use glasshouse_core::{Env, EnvConfig};
//!
//! let cfg = EnvConfig { episode_days: 1, ..EnvConfig::default() };
//! let weather = synthetic(0, 1, &SyntheticProfile::spring()).unwrap();
//! let mut env = Env::new(cfg, Arc::new(weather)).unwrap();
//! let mut obs = env.reset(7).unwrap();
//! loop {
//!     let res = env.step(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
//!     obs = res.observation;
//!     if res.truncated {
//!         break;
//!     }
//! }
//! assert_eq!(env.step_index(), 288);
//! # let _ = obs;
//! ```

pub mod config;
pub mod randomize;
pub mod reward;

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clock::SimClock;
use crate::control::{ControlContext, Controller};
use crate::error::{Error, Result};
use crate::integrator;
use crate::model::observe::observe_into;
use crate::model::params::{Param, ParamValues, ParameterSet};
use crate::model::{clamp_controls, Controls, Disturbance, State, CONTROL_LEN};
use crate::weather::WeatherSeries;

use config::{EnvConfig, ResampleMode};
use reward::{combined_reward, reward_epi, reward_penalty, EpiScale, EpisodeMetrics, RewardBreakdown};

/// Diagnostic payload of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    /// Index of the step just taken (0-based).
    pub step: usize,
    pub reward: RewardBreakdown,
    /// State after the step.
    pub state: State,
    /// Clamped controls that were applied.
    pub controls: Controls,
    pub disturbance: Disturbance,
    /// `1 + ε` for each randomized parameter, in [`Env::randomized_params`] order.
    pub multipliers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// Always false: the model has no failure states.
    pub terminated: bool,
    /// True on the last step of the episode.
    pub truncated: bool,
    pub info: StepInfo,
}

/// One greenhouse episode. Single-threaded; run independent instances in parallel.
#[derive(Debug, Clone)]
pub struct Env {
    config: EnvConfig,
    weather: Arc<WeatherSeries>,
    nominal: ParameterSet,
    epi_scale: EpiScale,
    daily_radiation: Vec<f64>,
    episode_len: usize,

    rng: ChaCha8Rng,
    params: ParamValues,
    multipliers: Vec<f64>,
    state: State,
    last_controls: Controls,
    clock: SimClock,
    k: usize,
    ready: bool,
}

impl Env {
    pub fn new(config: EnvConfig, weather: Arc<WeatherSeries>) -> Result<Self> {
        config.validate()?;
        if weather.dt() != config.dt() {
            return Err(Error::InvalidConfig(alloc::format!(
                "weather spacing {} s differs from model step {} s; resample the series first",
                weather.dt(),
                config.dt()
            )));
        }
        let episode_len = config.episode_steps()?;
        let nominal = config.parameter_set()?;
        let epi_scale = EpiScale::from_config(&config)?;
        let daily_radiation = daily_sums(&weather);
        let n_rand = nominal.randomized().len();
        Ok(Self {
            params: *nominal.values(),
            multipliers: alloc::vec![1.0; n_rand],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            state: config.initial_state,
            clock: SimClock::new(weather.start(), config.dt()),
            config,
            weather,
            nominal,
            epi_scale,
            daily_radiation,
            episode_len,
            last_controls: Controls::default(),
            k: 0,
            ready: false,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn weather(&self) -> &Arc<WeatherSeries> {
        &self.weather
    }

    /// Episode length N.
    pub fn episode_len(&self) -> usize {
        self.episode_len
    }

    pub fn observation_len(&self) -> usize {
        self.config.observation.len()
    }

    pub fn randomized_params(&self) -> &[Param] {
        self.nominal.randomized()
    }

    pub fn epi_scale(&self) -> EpiScale {
        self.epi_scale
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn clock(&self) -> &SimClock {
        &self.clock
    }

    pub fn step_index(&self) -> usize {
        self.k
    }

    /// Parameter values currently in effect.
    pub fn params(&self) -> &ParamValues {
        &self.params
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn is_done(&self) -> bool {
        self.k >= self.episode_len
    }

    fn weather_row(&self, k: usize) -> Disturbance {
        *self.weather.row(k.min(self.weather.len() - 1))
    }

    /// Weather for the current step.
    pub fn disturbance(&self) -> Disturbance {
        self.weather_row(self.k)
    }

    /// Radiation sum of the current day as known in advance (perfect forecast), MJ m⁻².
    pub fn daily_radiation(&self) -> f64 {
        let day = (self.clock.elapsed() / 86_400.0) as usize;
        self.daily_radiation[day.min(self.daily_radiation.len() - 1)]
    }

    /// Starts a new episode. Identical seeds give identical episodes.
    pub fn reset(&mut self, seed: u64) -> Result<Vec<f64>> {
        let required = self.episode_len + self.config.observation.forecast_horizon;
        if self.weather.len() < required {
            return Err(Error::WeatherTooShort {
                required,
                available: self.weather.len(),
            });
        }
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.state = self.config.initial_state;
        self.last_controls = Controls::default();
        self.clock = SimClock::new(self.weather.start(), self.config.dt());
        self.k = 0;
        self.params = *self.nominal.values();
        self.multipliers.fill(1.0);
        if self.config.uncertainty.resample == ResampleMode::PerEpisode {
            self.resample_params();
        }
        self.ready = true;
        let mut obs = Vec::with_capacity(self.observation_len());
        self.observe_into(&mut obs)?;
        Ok(obs)
    }

    fn resample_params(&mut self) {
        randomize::sample_into(&self.nominal, &mut self.rng, &mut self.params, &mut self.multipliers);
    }

    /// Observation for the current step index.
    pub fn observe_into(&self, out: &mut Vec<f64>) -> Result<()> {
        let h = self.config.observation.forecast_horizon;
        let forecast: Vec<Disturbance> = (1..=h).map(|j| self.weather_row(self.k + j)).collect();
        observe_into(
            out,
            &self.state,
            &self.last_controls,
            &self.disturbance(),
            &self.clock,
            &forecast,
            &self.config.observation,
        )
    }

    /// Inputs a controller needs for the current step.
    pub fn context<'a>(&self, observation: &'a [f64]) -> ControlContext<'a> {
        ControlContext {
            observation,
            t_air: self.state.t_air,
            co2_ppm: self.state.co2_ppm(),
            rh: self.state.rh(),
            disturbance: self.disturbance(),
            clock: self.clock,
            daily_radiation: self.daily_radiation(),
            previous: self.last_controls,
        }
    }

    /// Applies `action` (clamped to the actuator bounds) for one step.
    pub fn step(&mut self, action: &[f64; CONTROL_LEN]) -> Result<StepResult> {
        if !self.ready {
            return Err(Error::NotReset);
        }
        if self.is_done() {
            return Err(Error::EpisodeDone { steps: self.k });
        }
        let u = clamp_controls(action)?;
        if self.config.uncertainty.resample == ResampleMode::PerStep {
            self.resample_params();
        }
        let d = self.disturbance();
        let prev = self.state;
        let next = integrator::advance(&prev, &u, &d, &self.params, &self.config.integrator)?;

        let harvest = (next.w_harvest - prev.w_harvest).max(0.0);
        let epi_raw = reward_epi(harvest, &u, &self.config.prices, self.config.dt());
        let epi_scaled = self.epi_scale.scale(epi_raw);
        let y = [next.t_air, next.co2_ppm(), next.rh()];
        let penalties = reward_penalty(&y, &self.config.constraints, &self.config.penalty_scale);
        let total = combined_reward(epi_scaled, &penalties);
        let breakdown = RewardBreakdown {
            epi_raw,
            epi_scaled,
            penalties,
            total,
        };

        let step = self.k;
        self.state = next;
        self.last_controls = u;
        self.k += 1;
        self.clock.advance();

        let mut observation = Vec::with_capacity(self.observation_len());
        self.observe_into(&mut observation)?;
        Ok(StepResult {
            observation,
            reward: total,
            terminated: false,
            truncated: self.is_done(),
            info: StepInfo {
                step,
                reward: breakdown,
                state: next,
                controls: u,
                disturbance: d,
                multipliers: self.multipliers.clone(),
            },
        })
    }

    /// Runs one full episode with `controller`, calling `on_step` after every step.
    pub fn run_episode<C, F>(&mut self, controller: &mut C, seed: u64, mut on_step: F) -> Result<EpisodeMetrics>
    where
        C: Controller + ?Sized,
        F: FnMut(&StepResult),
    {
        let mut obs = self.reset(seed)?;
        controller.reset();
        let mut metrics = EpisodeMetrics::default();
        loop {
            let action = controller.act(&self.context(&obs))?;
            let res = self.step(&action)?;
            metrics.push(&res.info.reward);
            on_step(&res);
            if res.truncated {
                return Ok(metrics);
            }
            obs = res.observation;
        }
    }
}

fn daily_sums(weather: &WeatherSeries) -> Vec<f64> {
    match weather.rows_per_day() {
        Some(per_day) => weather
            .rows()
            .chunks(per_day)
            .map(|day| day.iter().map(|r| r.i_glob * weather.dt()).sum::<f64>() / 1e6)
            .collect(),
        None => alloc::vec![0.0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ConstantController;
    use crate::weather::{synthetic, SyntheticProfile};

    fn one_day() -> EnvConfig {
        EnvConfig {
            episode_days: 1,
            ..EnvConfig::default()
        }
    }

    fn env(cfg: EnvConfig, days: usize) -> Env {
        let w = synthetic(1, days, &SyntheticProfile::spring()).unwrap();
        Env::new(cfg, Arc::new(w)).unwrap()
    }

    #[test]
    fn step_before_reset_fails() {
        let mut e = env(one_day(), 1);
        assert_eq!(e.step(&[0.0; 6]).unwrap_err(), Error::NotReset);
    }

    #[test]
    fn short_weather_rejected_with_lengths() {
        let cfg = EnvConfig {
            episode_days: 2,
            ..EnvConfig::default()
        };
        let mut e = env(cfg, 1);
        assert_eq!(
            e.reset(0).unwrap_err(),
            Error::WeatherTooShort {
                required: 576,
                available: 288
            }
        );
    }

    #[test]
    fn truncates_after_episode_and_rejects_further_steps() {
        let mut e = env(one_day(), 1);
        e.reset(3).unwrap();
        let mut last = None;
        for _ in 0..288 {
            last = Some(e.step(&[0.0; 6]).unwrap());
        }
        let last = last.unwrap();
        assert!(last.truncated && !last.terminated);
        assert_eq!(last.info.step, 287);
        assert!(matches!(e.step(&[0.0; 6]), Err(Error::EpisodeDone { steps: 288 })));
    }

    #[test]
    fn non_finite_action_rejected() {
        let mut e = env(one_day(), 1);
        e.reset(0).unwrap();
        assert!(matches!(e.step(&[f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0]), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn zero_action_epi_is_pure_revenue() {
        let mut cfg = one_day();
        cfg.initial_state.t_can_sum = 400.0;
        cfg.initial_state.w_fruit = 1.0;
        let mut e = env(cfg, 1);
        e.reset(0).unwrap();
        let before = e.state().w_harvest;
        let r = e.step(&[0.0; 6]).unwrap();
        let dh = r.info.state.w_harvest - before;
        assert!(dh > 0.0);
        assert_eq!(r.info.reward.epi_raw, 1.6 * dh);
    }

    #[test]
    fn per_episode_draw_is_fixed_within_episode() {
        let mut cfg = one_day();
        cfg.uncertainty.delta = 0.2;
        cfg.uncertainty.resample = ResampleMode::PerEpisode;
        let mut e = env(cfg, 1);
        e.reset(9).unwrap();
        let m0 = e.multipliers().to_vec();
        assert!(m0.iter().any(|m| *m != 1.0));
        for _ in 0..5 {
            assert_eq!(e.step(&[0.0; 6]).unwrap().info.multipliers, m0);
        }
    }

    #[test]
    fn run_episode_counts_steps() {
        let mut e = env(one_day(), 1);
        let mut n = 0;
        let m = e
            .run_episode(&mut ConstantController::new([0.0; 6]), 4, |_| n += 1)
            .unwrap();
        assert_eq!(n, 288);
        assert_eq!(m.steps, 288);
    }

    #[test]
    fn mismatched_weather_spacing_rejected() {
        let w = synthetic(1, 1, &SyntheticProfile::spring()).unwrap().resample(600.0).unwrap();
        assert!(Env::new(one_day(), Arc::new(w)).is_err());
    }
}
