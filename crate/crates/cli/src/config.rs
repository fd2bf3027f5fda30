//! YAML environment document.
//!
//! Every key is optional; omitted keys take the library defaults. Unknown keys
//! are rejected so typos surface instead of silently using a default.
//!
//! ```yaml
//! episode_days: 3
//! dt: 300
//! uncertainty:
//!   delta: 0.15
//!   resample: per_step
//! weather:
//!   source: synthetic
//!   seed: 0
//!   profile: spring
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use glasshouse_core::weather::{synthetic, SyntheticProfile};
use glasshouse_core::{
    ConstraintBounds, Env, EnvConfig, IntegratorConfig, Method, ObservationConfig, Param, ParamValues, Prices,
    ResampleMode, State, UncertaintyConfig, WeatherSeries,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weather_csv;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvDocument {
    pub episode_days: u32,
    /// Model step, s.
    pub dt: f64,
    pub substeps: u32,
    pub method: Method,
    pub observation: ObservationConfig,
    pub uncertainty: UncertaintyDoc,
    pub constraints: ConstraintBounds,
    pub prices: Prices,
    pub penalty_scale: [f64; 3],
    pub initial_state: InitialState,
    /// Overrides of nominal parameter values by name.
    pub parameters: BTreeMap<String, f64>,
    pub max_radiation: f64,
    pub weather: WeatherDoc,
    /// Default episode seed when none is given on the command line.
    pub seed: u64,
}

impl Default for EnvDocument {
    fn default() -> Self {
        let c = EnvConfig::default();
        Self {
            episode_days: c.episode_days,
            dt: c.integrator.dt,
            substeps: c.integrator.substeps,
            method: c.integrator.method,
            observation: c.observation,
            uncertainty: UncertaintyDoc::default(),
            constraints: c.constraints,
            prices: c.prices,
            penalty_scale: c.penalty_scale,
            initial_state: InitialState::default(),
            parameters: BTreeMap::new(),
            max_radiation: c.max_radiation,
            weather: WeatherDoc::default(),
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyDoc {
    pub delta: f64,
    /// Parameter names; defaults to the crop subset.
    pub randomized: Vec<String>,
    pub resample: ResampleMode,
}

impl Default for UncertaintyDoc {
    fn default() -> Self {
        Self {
            delta: 0.0,
            randomized: Param::CROP.iter().map(|p| p.name().to_string()).collect(),
            resample: ResampleMode::PerStep,
        }
    }
}

/// Initial state in model units (CO₂ in mg m⁻³, vapor pressure in Pa).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub t_air: f64,
    pub t_pipe: f64,
    pub co2_air: f64,
    pub vp_air: f64,
    pub t_can24: f64,
    pub t_can_sum: f64,
    pub w_fruit: f64,
    pub w_harvest: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        State::initial().into()
    }
}

impl From<State> for InitialState {
    fn from(s: State) -> Self {
        Self {
            t_air: s.t_air,
            t_pipe: s.t_pipe,
            co2_air: s.co2_air,
            vp_air: s.vp_air,
            t_can24: s.t_can24,
            t_can_sum: s.t_can_sum,
            w_fruit: s.w_fruit,
            w_harvest: s.w_harvest,
        }
    }
}

impl From<InitialState> for State {
    fn from(s: InitialState) -> Self {
        State {
            t_air: s.t_air,
            t_pipe: s.t_pipe,
            co2_air: s.co2_air,
            vp_air: s.vp_air,
            t_can24: s.t_can24,
            t_can_sum: s.t_can_sum,
            w_fruit: s.w_fruit,
            w_harvest: s.w_harvest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeatherKind {
    #[default]
    Synthetic,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    #[default]
    Spring,
    Winter,
    Mild,
}

impl ProfileName {
    pub fn profile(self) -> SyntheticProfile {
        match self {
            ProfileName::Spring => SyntheticProfile::spring(),
            ProfileName::Winter => SyntheticProfile::winter(),
            ProfileName::Mild => SyntheticProfile::mild(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeatherDoc {
    pub source: WeatherKind,
    /// Synthetic only.
    pub seed: u64,
    /// Synthetic only; defaults to just enough days for one episode plus forecast.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub days: Option<usize>,
    /// Synthetic only.
    pub profile: ProfileName,
    /// CSV only; relative paths resolve against the config file's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for WeatherDoc {
    fn default() -> Self {
        Self {
            source: WeatherKind::Synthetic,
            seed: 0,
            days: None,
            profile: ProfileName::Spring,
            path: None,
        }
    }
}

impl EnvDocument {
    pub fn from_yaml_str(text: &str) -> Result<Self> {
        Ok(serde_yaml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_yaml_str(&text).map_err(|e| match e {
            Error::Yaml(y) => Error::Invalid(format!("{}: {y}", path.display())),
            other => other,
        })
    }

    pub fn to_yaml(&self) -> Result<String> {
        Ok(serde_yaml::to_string(self)?)
    }

    /// Validated core configuration.
    pub fn env_config(&self) -> Result<EnvConfig> {
        let mut parameters = ParamValues::nominal();
        for (name, v) in &self.parameters {
            parameters[Param::from_name(name)?] = *v;
        }
        let randomized = self
            .uncertainty
            .randomized
            .iter()
            .map(|n| Param::from_name(n))
            .collect::<glasshouse_core::Result<Vec<_>>>()?;
        let cfg = EnvConfig {
            episode_days: self.episode_days,
            integrator: IntegratorConfig {
                dt: self.dt,
                substeps: self.substeps,
                method: self.method,
            },
            observation: self.observation,
            uncertainty: UncertaintyConfig {
                delta: self.uncertainty.delta,
                randomized,
                resample: self.uncertainty.resample,
            },
            constraints: self.constraints,
            prices: self.prices,
            penalty_scale: self.penalty_scale,
            initial_state: self.initial_state.into(),
            parameters,
            max_radiation: self.max_radiation,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Weather rows needed for one episode plus the forecast window.
    pub fn required_rows(&self) -> Result<usize> {
        let cfg = self.env_config()?;
        Ok(cfg.episode_steps()? + cfg.observation.forecast_horizon)
    }

    /// Loads or generates the weather series at the model step.
    pub fn weather(&self, base_dir: &Path) -> Result<WeatherSeries> {
        let required = self.required_rows()?;
        let w = &self.weather;
        match w.source {
            WeatherKind::Synthetic => {
                let per_day = (86_400.0 / self.dt) as usize;
                let days = w.days.unwrap_or(required.div_ceil(per_day.max(1)));
                let profile = SyntheticProfile {
                    dt: self.dt,
                    ..w.profile.profile()
                };
                Ok(synthetic(w.seed, days, &profile)?)
            }
            WeatherKind::Csv => {
                let rel = w
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("config: weather.source = csv needs weather.path".into()))?;
                let path = base_dir.join(rel);
                let series = weather_csv::load_csv(&path)?;
                if series.dt() == self.dt {
                    Ok(series)
                } else {
                    Ok(series.resample(self.dt)?)
                }
            }
        }
    }

    pub fn build_env(&self, base_dir: &Path) -> Result<Env> {
        let cfg = self.env_config()?;
        let weather = self.weather(base_dir)?;
        Ok(Env::new(cfg, Arc::new(weather))?)
    }
}

/// Parses a YAML document and builds its environment. Errors carry the
/// library's diagnostic text unchanged.
pub fn env_from_yaml(text: &str, base_dir: &Path) -> Result<Env> {
    EnvDocument::from_yaml_str(text)?.build_env(base_dir)
}

/// Reads the document at `path`, or the defaults when `path` is `None`.
/// Returns the document and the directory relative paths resolve against.
pub fn load_document(path: Option<&Path>) -> Result<(EnvDocument, PathBuf)> {
    match path {
        Some(p) => {
            let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((EnvDocument::from_path(p)?, dir))
        }
        None => Ok((EnvDocument::default(), PathBuf::from("."))),
    }
}
