//! Greenhouse state, inputs, and the continuous-time dynamics.

pub mod convert;
pub mod dynamics;
pub mod observe;
pub mod params;

use crate::error::{Error, Result};

pub use convert::{co2_mgm3_to_ppm, co2_ppm_to_mgm3, relative_humidity, saturation_vapor_pressure};
pub use dynamics::derivative;

/// Number of state variables.
pub const STATE_LEN: usize = 8;
/// Number of actuators.
pub const CONTROL_LEN: usize = 6;
/// Number of weather inputs.
pub const DISTURBANCE_LEN: usize = 5;

/// Physical state of the greenhouse: indoor climate plus crop.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct State {
    /// Indoor air temperature, °C.
    pub t_air: f64,
    /// Heating-pipe temperature, °C.
    pub t_pipe: f64,
    /// Indoor CO₂ concentration, mg m⁻³.
    pub co2_air: f64,
    /// Indoor vapor pressure, Pa.
    pub vp_air: f64,
    /// 24 h low-pass filtered canopy temperature, °C.
    pub t_can24: f64,
    /// Canopy temperature sum, °C·day.
    pub t_can_sum: f64,
    /// Fruit dry weight, kg m⁻².
    pub w_fruit: f64,
    /// Cumulative harvested fruit dry weight, kg m⁻².
    pub w_harvest: f64,
}

impl State {
    pub const FIELD_NAMES: [&'static str; STATE_LEN] = [
        "t_air",
        "t_pipe",
        "co2_air",
        "vp_air",
        "t_can24",
        "t_can_sum",
        "w_fruit",
        "w_harvest",
    ];

    /// Indices of the fields projected onto `[0, ∞)` after each integration sub-step.
    pub(crate) const NON_NEGATIVE: [usize; 3] = [2, 3, 6];

    pub fn to_array(&self) -> [f64; STATE_LEN] {
        [
            self.t_air,
            self.t_pipe,
            self.co2_air,
            self.vp_air,
            self.t_can24,
            self.t_can_sum,
            self.w_fruit,
            self.w_harvest,
        ]
    }

    pub fn from_array(a: [f64; STATE_LEN]) -> Self {
        Self {
            t_air: a[0],
            t_pipe: a[1],
            co2_air: a[2],
            vp_air: a[3],
            t_can24: a[4],
            t_can_sum: a[5],
            w_fruit: a[6],
            w_harvest: a[7],
        }
    }

    /// CO₂ concentration in ppm at the current air temperature.
    pub fn co2_ppm(&self) -> f64 {
        co2_mgm3_to_ppm(self.co2_air, self.t_air)
    }

    /// Indoor relative humidity in percent.
    pub fn rh(&self) -> f64 {
        relative_humidity(self.vp_air, self.t_air)
    }

    pub fn check_finite(&self) -> Result<()> {
        check_all(&Self::FIELD_NAMES, &self.to_array())
    }

    /// Default initial state: 18 °C everywhere, 400 ppm CO₂, 75 %RH, a small fruit load.
    pub fn initial() -> Self {
        let t = 18.0;
        Self {
            t_air: t,
            t_pipe: t,
            co2_air: co2_ppm_to_mgm3(400.0, t),
            vp_air: 0.75 * saturation_vapor_pressure(t),
            t_can24: t,
            t_can_sum: 0.0,
            w_fruit: 0.05,
            w_harvest: 0.0,
        }
    }
}

impl Default for State {
    fn default() -> Self {
        Self::initial()
    }
}

/// Actuator settings within their closed bounds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Controls {
    /// Boiler heat input, W m⁻².
    pub u_boil: f64,
    /// CO₂ injection, mg m⁻² s⁻¹.
    pub u_co2: f64,
    /// Thermal screen closure, 0..1.
    pub u_thscr: f64,
    /// Roof ventilation aperture, 0..1.
    pub u_vent: f64,
    /// Lamp electrical input, W m⁻².
    pub u_lamp: f64,
    /// Blackout screen closure, 0..1.
    pub u_blscr: f64,
}

impl Controls {
    pub const FIELD_NAMES: [&'static str; CONTROL_LEN] =
        ["u_boil", "u_co2", "u_thscr", "u_vent", "u_lamp", "u_blscr"];
    pub const MIN: [f64; CONTROL_LEN] = [0.0; CONTROL_LEN];
    pub const MAX: [f64; CONTROL_LEN] = [130.0, 5.0, 1.0, 1.0, 116.0, 1.0];

    pub fn to_array(&self) -> [f64; CONTROL_LEN] {
        [
            self.u_boil,
            self.u_co2,
            self.u_thscr,
            self.u_vent,
            self.u_lamp,
            self.u_blscr,
        ]
    }

    /// Builds controls from an array without clamping.
    pub fn from_array(a: [f64; CONTROL_LEN]) -> Self {
        Self {
            u_boil: a[0],
            u_co2: a[1],
            u_thscr: a[2],
            u_vent: a[3],
            u_lamp: a[4],
            u_blscr: a[5],
        }
    }

    pub fn max() -> Self {
        Self::from_array(Self::MAX)
    }

    pub fn is_within_bounds(&self) -> bool {
        self.to_array()
            .iter()
            .enumerate()
            .all(|(i, v)| *v >= Self::MIN[i] && *v <= Self::MAX[i])
    }
}

/// Projects a raw action onto the actuator box. Idempotent.
pub fn clamp_controls(raw: &[f64; CONTROL_LEN]) -> Result<Controls> {
    check_all(&Controls::FIELD_NAMES, raw)?;
    let mut out = [0.0; CONTROL_LEN];
    for i in 0..CONTROL_LEN {
        out[i] = raw[i].clamp(Controls::MIN[i], Controls::MAX[i]);
    }
    Ok(Controls::from_array(out))
}

/// Outdoor weather held constant over one model step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Disturbance {
    /// Global radiation, W m⁻².
    pub i_glob: f64,
    /// Outdoor temperature, °C.
    pub t_out: f64,
    /// Outdoor relative humidity, %.
    pub rh_out: f64,
    /// Outdoor CO₂, ppm.
    pub co2_out: f64,
    /// Wind speed, m s⁻¹.
    pub wind: f64,
}

impl Disturbance {
    pub const FIELD_NAMES: [&'static str; DISTURBANCE_LEN] =
        ["i_glob", "t_out", "rh_out", "co2_out", "wind"];

    pub fn to_array(&self) -> [f64; DISTURBANCE_LEN] {
        [self.i_glob, self.t_out, self.rh_out, self.co2_out, self.wind]
    }

    pub fn from_array(a: [f64; DISTURBANCE_LEN]) -> Self {
        Self {
            i_glob: a[0],
            t_out: a[1],
            rh_out: a[2],
            co2_out: a[3],
            wind: a[4],
        }
    }

    /// Checks finiteness and the physical ranges of every field.
    pub fn validate(&self) -> Result<()> {
        check_all(&Self::FIELD_NAMES, &self.to_array())?;
        let bad = |what: &str| Err(Error::InvalidWeather(alloc::format!("{what} out of range: {self:?}")));
        if self.i_glob < 0.0 {
            return bad("i_glob");
        }
        if !(0.0..=100.0).contains(&self.rh_out) {
            return bad("rh_out");
        }
        if self.co2_out <= 0.0 {
            return bad("co2_out");
        }
        if self.wind < 0.0 {
            return bad("wind");
        }
        Ok(())
    }
}

pub(crate) fn check_all(names: &[&'static str], values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite {
            field: names[i],
            value: values[i],
        }),
        None => Ok(()),
    }
}
