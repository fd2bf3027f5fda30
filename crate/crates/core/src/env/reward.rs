//! Economic reward, constraint penalties and their combination.

use alloc::format;

use super::config::{ConstraintBounds, EnvConfig, Prices};
use crate::error::{Error, Result};
use crate::model::params::Param;
use crate::model::Controls;

const MG_TO_KG: f64 = 1e-6;
const J_TO_KWH: f64 = 1.0 / 3.6e6;

/// Per-step reward decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RewardBreakdown {
    /// Operational return of the step, € m⁻².
    pub epi_raw: f64,
    /// `epi_raw` min-max scaled into `[0, 1]`.
    pub epi_scaled: f64,
    /// Scaled penalties for temperature, CO₂ and humidity, each in `[0, 1]`.
    pub penalties: [f64; 3],
    /// `epi_scaled − Σ penalties`.
    pub total: f64,
}

impl RewardBreakdown {
    pub fn penalty_sum(&self) -> f64 {
        self.penalties[0] + self.penalties[1] + self.penalties[2]
    }
}

/// Fruit revenue minus CO₂, heating and lighting costs over one step of `dt` seconds.
///
/// Flows are converted to per-step quantities: CO₂ to kg, heat and light to kWh.
pub fn reward_epi(delta_harvest: f64, u: &Controls, prices: &Prices, dt: f64) -> f64 {
    let co2_kg = u.u_co2 * dt * MG_TO_KG;
    let boil_kwh = u.u_boil * dt * J_TO_KWH;
    let lamp_kwh = u.u_lamp * dt * J_TO_KWH;
    prices.fruit * delta_harvest - (prices.co2 * co2_kg + prices.boil * boil_kwh + prices.lamp * lamp_kwh)
}

/// Affine map of the raw EPI onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpiScale {
    pub min: f64,
    pub max: f64,
}

impl EpiScale {
    /// `min`: no harvest at maximum resource use. `max`: maximum harvest at zero resource use.
    pub fn new(prices: &Prices, dt: f64, max_harvest_per_step: f64) -> Result<Self> {
        let min = reward_epi(0.0, &Controls::max(), prices, dt);
        let max = prices.fruit * max_harvest_per_step;
        if max.is_nan() || min.is_nan() || max <= min {
            return Err(Error::InvalidConfig(format!(
                "degenerate EPI scaling: max {max} must exceed min {min}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn from_config(cfg: &EnvConfig) -> Result<Self> {
        Self::new(&cfg.prices, cfg.dt(), max_harvest_per_step(cfg))
    }

    pub fn scale(&self, epi_raw: f64) -> f64 {
        ((epi_raw - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
    }
}

/// Upper bound on fruit mass gained in one step under nominal parameters, kg m⁻²:
/// all assimilate at maximum sun plus full lamps goes to fruit.
pub fn max_harvest_per_step(cfg: &EnvConfig) -> f64 {
    let p = &cfg.parameters;
    let par_max = p[Param::EtaParSun] * cfg.max_radiation + p[Param::EtaParLamp] * Controls::MAX[4];
    p[Param::CAb] * p[Param::EpsLight] * par_max * cfg.dt() * MG_TO_KG
}

/// Unscaled linear violation of one box constraint.
#[inline]
pub fn raw_penalty(y: f64, lower: f64, upper: f64) -> f64 {
    if y > upper {
        y - upper
    } else if y < lower {
        lower - y
    } else {
        0.0
    }
}

/// Scaled penalties for `(temperature, CO₂ ppm, RH)`, each `min(1, P / scale)`.
pub fn reward_penalty(y: &[f64; 3], bounds: &ConstraintBounds, scale: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (raw_penalty(y[i], bounds.lower[i], bounds.upper[i]) / scale[i]).min(1.0);
    }
    out
}

#[inline]
pub fn combined_reward(epi_scaled: f64, penalties: &[f64; 3]) -> f64 {
    epi_scaled - (penalties[0] + penalties[1] + penalties[2])
}

/// Episode totals over steps `0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeMetrics {
    pub cum_reward: f64,
    /// Unscaled, € m⁻².
    pub cum_epi_raw: f64,
    /// Sum of scaled penalties.
    pub cum_penalty: f64,
    pub steps: usize,
}

impl EpisodeMetrics {
    pub fn push(&mut self, r: &RewardBreakdown) {
        self.cum_reward += r.total;
        self.cum_epi_raw += r.epi_raw;
        self.cum_penalty += r.penalty_sum();
        self.steps += 1;
    }
}

/// Totals of a complete trajectory of `episode_len` steps.
pub fn episode_metrics(trajectory: &[RewardBreakdown], episode_len: usize) -> Result<EpisodeMetrics> {
    if trajectory.len() != episode_len {
        return Err(Error::IncompleteEpisode {
            expected: episode_len,
            actual: trajectory.len(),
        });
    }
    let mut m = EpisodeMetrics::default();
    for r in trajectory {
        m.push(r);
    }
    Ok(m)
}

/// `Σ γᵏ rₖ`.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    rewards.iter().rev().fold(0.0, |acc, r| r + gamma * acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epi_cases() {
        let prices = Prices::default();
        assert_eq!(reward_epi(0.0, &Controls::default(), &prices, 300.0), 0.0);
        let boil = Controls {
            u_boil: 130.0,
            ..Default::default()
        };
        let v = reward_epi(0.0, &boil, &prices, 300.0);
        assert!((v + 0.09 * 130.0 * 300.0 / 3.6e6).abs() < 1e-18);
        assert!((v + 9.75e-4).abs() < 1e-12);
        assert!((reward_epi(0.01, &Controls::default(), &prices, 300.0) - 0.016).abs() < 1e-15);
    }

    #[test]
    fn screens_and_vents_are_free() {
        let u = Controls {
            u_thscr: 1.0,
            u_vent: 1.0,
            u_blscr: 1.0,
            ..Default::default()
        };
        assert_eq!(reward_epi(0.0, &u, &Prices::default(), 300.0), 0.0);
    }

    #[test]
    fn scale_endpoints() {
        let s = EpiScale::from_config(&EnvConfig::default()).unwrap();
        assert_eq!(s.scale(s.min), 0.0);
        assert_eq!(s.scale(s.max), 1.0);
        assert!((s.scale(0.5 * (s.min + s.max)) - 0.5).abs() < 1e-12);
        assert_eq!(s.scale(s.max + 1.0), 1.0);
        assert_eq!(s.scale(s.min - 1.0), 0.0);
    }

    #[test]
    fn penalty_cases() {
        let b = ConstraintBounds::default();
        let scale = [10.0, 1000.0, 30.0];
        assert_eq!(reward_penalty(&[20.0, 800.0, 70.0], &b, &scale), [0.0; 3]);
        assert_eq!(raw_penalty(36.0, 15.0, 34.0), 2.0);
        assert_eq!(reward_penalty(&[36.0, 800.0, 70.0], &b, &scale)[0], 0.2);
        assert_eq!(reward_penalty(&[-40.0, 0.0, 200.0], &b, &scale), [1.0, 0.3, 1.0]);
    }

    #[test]
    fn combined_cases() {
        assert_eq!(combined_reward(1.0, &[0.0; 3]), 1.0);
        assert_eq!(combined_reward(0.0, &[1.0; 3]), -3.0);
        assert!((combined_reward(0.5, &[0.2, 0.0, 0.1]) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn metrics_require_complete_episode() {
        let r = RewardBreakdown {
            epi_raw: -0.1,
            epi_scaled: 0.4,
            penalties: [0.1, 0.0, 0.2],
            total: 0.1,
        };
        let m = episode_metrics(&[r], 1).unwrap();
        assert_eq!((m.cum_reward, m.cum_epi_raw, m.cum_penalty), (0.1, -0.1, r.penalty_sum()));
        assert!(matches!(episode_metrics(&[r], 2), Err(Error::IncompleteEpisode { .. })));
        let zero = episode_metrics(&[RewardBreakdown::default(); 4], 4).unwrap();
        assert_eq!((zero.cum_reward, zero.cum_epi_raw, zero.cum_penalty), (0.0, 0.0, 0.0));
    }

    #[test]
    fn discounting() {
        assert_eq!(discounted_return(&[3.0, 5.0, 7.0], 0.0), 3.0);
        assert_eq!(discounted_return(&[1.0; 10], 1.0), 10.0);
        let ones = alloc::vec![1.0; 17_280];
        // (1 - 0.9631^17280) / (1 - 0.9631) = 27.100271002710027
        assert!((discounted_return(&ones, 0.9631) - 27.100_271_002_710_027).abs() < 1e-9);
    }
}
