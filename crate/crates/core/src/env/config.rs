use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::observe::ObservationConfig;
use crate::model::params::{Param, ParamValues, ParameterSet};
use crate::model::State;

/// When randomized parameters are redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ResampleMode {
    #[default]
    PerStep,
    PerEpisode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyConfig {
    /// Half-range δ of the multiplicative noise, in `[0, 1)`.
    pub delta: f64,
    pub randomized: Vec<Param>,
    pub resample: ResampleMode,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        Self {
            delta: 0.0,
            randomized: Param::CROP.to_vec(),
            resample: ResampleMode::PerStep,
        }
    }
}

/// Box constraints on (temperature °C, CO₂ ppm, RH %).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ConstraintBounds {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl Default for ConstraintBounds {
    fn default() -> Self {
        Self {
            lower: [15.0, 300.0, 50.0],
            upper: [34.0, 1600.0, 85.0],
        }
    }
}

/// Unit prices: fruit and CO₂ in € kg⁻¹, heating and lighting in € kWh⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Prices {
    pub fruit: f64,
    pub co2: f64,
    pub boil: f64,
    pub lamp: f64,
}

impl Default for Prices {
    fn default() -> Self {
        Self {
            fruit: 1.6,
            co2: 0.3,
            boil: 0.09,
            lamp: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub episode_days: u32,
    pub integrator: IntegratorConfig,
    pub observation: ObservationConfig,
    pub uncertainty: UncertaintyConfig,
    pub constraints: ConstraintBounds,
    pub prices: Prices,
    /// Raw penalty at which each scaled penalty saturates at 1.
    pub penalty_scale: [f64; 3],
    pub initial_state: State,
    /// Nominal parameter values μ_p.
    pub parameters: ParamValues,
    /// Global radiation used to bound the harvest term of the EPI scaling, W m⁻².
    pub max_radiation: f64,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            episode_days: 60,
            integrator: IntegratorConfig::default(),
            observation: ObservationConfig::default(),
            uncertainty: UncertaintyConfig::default(),
            constraints: ConstraintBounds::default(),
            prices: Prices::default(),
            penalty_scale: [10.0, 1000.0, 30.0],
            initial_state: State::initial(),
            parameters: ParamValues::nominal(),
            max_radiation: 1000.0,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn dt(&self) -> f64 {
        self.integrator.dt
    }

    /// Episode length N in steps.
    pub fn episode_steps(&self) -> Result<usize> {
        let total = f64::from(self.episode_days) * 86_400.0;
        let n = total / self.dt();
        if n != crate::math::round(n) {
            return Err(Error::InvalidConfig(format!(
                "episode of {} days is not a whole number of {} s steps",
                self.episode_days,
                self.dt()
            )));
        }
        Ok(n as usize)
    }

    pub fn parameter_set(&self) -> Result<ParameterSet> {
        ParameterSet::new(self.parameters, &self.uncertainty.randomized, self.uncertainty.delta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.episode_days == 0 {
            return Err(Error::InvalidConfig("episode_days must be >= 1".into()));
        }
        self.integrator.validate()?;
        self.episode_steps()?;
        self.observation.validate()?;
        self.parameter_set()?;
        let c = &self.constraints;
        for i in 0..3 {
            if !(c.lower[i].is_finite() && c.upper[i].is_finite() && c.lower[i] < c.upper[i]) {
                return Err(Error::InvalidConfig(format!(
                    "constraint {i}: lower {} must be < upper {}",
                    c.lower[i], c.upper[i]
                )));
            }
            if !(self.penalty_scale[i].is_finite() && self.penalty_scale[i] > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "penalty scale {i} must be > 0, got {}",
                    self.penalty_scale[i]
                )));
            }
        }
        let p = &self.prices;
        for (name, v) in [("fruit", p.fruit), ("co2", p.co2), ("boil", p.boil), ("lamp", p.lamp)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("price `{name}` must be >= 0, got {v}")));
            }
        }
        if !(self.max_radiation.is_finite() && self.max_radiation >= 0.0) {
            return Err(Error::InvalidConfig("max_radiation must be >= 0".into()));
        }
        self.initial_state.check_finite()?;
        super::reward::EpiScale::from_config(self)?;
        Ok(())
    }
}
