//! Setpoint-based baseline grower.
//!
//! | actuator | rule |
//! |---|---|
//! | lamps | full power in `[lamp_on, lamp_off)` h unless sun > `rad_cutoff` or the day's sum > `daily_rad_cutoff` |
//! | CO₂ | P-control up to `co2_setpoint` during the light period |
//! | boiler | P-control up to the period setpoint |
//! | vents | open above setpoint + `vent_open_offset` or RH > `rh_threshold`; close below setpoint + `vent_close_offset` |
//! | thermal screen | closed when outside is colder than the day/night threshold; opened above setpoint + `thscr_open_offset` or RH > `rh_threshold` |
//! | blackout screen | closed while lamps burn in solar darkness |
//!
//! The light period is "lamps were on last step, or the sun is up" (`i_glob > light_threshold`).

use alloc::format;

use super::{p_control, ControlContext, Controller};
use crate::error::{Error, Result};
use crate::model::{Controls, CONTROL_LEN};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RuleBasedConfig {
    /// Hour the lamp window opens (inclusive).
    pub lamp_on: f64,
    /// Hour the lamp window closes (exclusive).
    pub lamp_off: f64,
    /// W m⁻².
    pub rad_cutoff: f64,
    /// MJ m⁻² d⁻¹.
    pub daily_rad_cutoff: f64,
    pub co2_setpoint: f64,
    pub t_set_light: f64,
    pub t_set_dark: f64,
    pub vent_open_offset: f64,
    pub vent_close_offset: f64,
    pub rh_threshold: f64,
    pub thscr_out_day: f64,
    pub thscr_out_night: f64,
    pub thscr_open_offset: f64,
    /// Global radiation above which it counts as daytime, W m⁻².
    pub light_threshold: f64,
    pub band_co2: f64,
    pub band_heat: f64,
    pub band_vent_t: f64,
    pub band_vent_rh: f64,
    pub band_thscr: f64,
}

impl Default for RuleBasedConfig {
    fn default() -> Self {
        Self {
            lamp_on: 0.0,
            lamp_off: 18.0,
            rad_cutoff: 400.0,
            daily_rad_cutoff: 10.0,
            co2_setpoint: 800.0,
            t_set_light: 19.5,
            t_set_dark: 16.5,
            vent_open_offset: 5.0,
            vent_close_offset: -1.0,
            rh_threshold: 85.0,
            thscr_out_day: 5.0,
            thscr_out_night: 10.0,
            thscr_open_offset: 4.0,
            light_threshold: 5.0,
            band_co2: 100.0,
            band_heat: 2.0,
            band_vent_t: 2.0,
            band_vent_rh: 5.0,
            band_thscr: 2.0,
        }
    }
}

impl RuleBasedConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("lamp_on", self.lamp_on),
            ("lamp_off", self.lamp_off),
            ("rad_cutoff", self.rad_cutoff),
            ("daily_rad_cutoff", self.daily_rad_cutoff),
            ("co2_setpoint", self.co2_setpoint),
            ("t_set_light", self.t_set_light),
            ("t_set_dark", self.t_set_dark),
            ("vent_open_offset", self.vent_open_offset),
            ("vent_close_offset", self.vent_close_offset),
            ("rh_threshold", self.rh_threshold),
            ("thscr_out_day", self.thscr_out_day),
            ("thscr_out_night", self.thscr_out_night),
            ("thscr_open_offset", self.thscr_open_offset),
            ("light_threshold", self.light_threshold),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("rule-based `{name}` must be finite, got {v}")));
            }
        }
        let bands = [
            ("band_co2", self.band_co2),
            ("band_heat", self.band_heat),
            ("band_vent_t", self.band_vent_t),
            ("band_vent_rh", self.band_vent_rh),
            ("band_thscr", self.band_thscr),
        ];
        for (name, v) in bands {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("rule-based `{name}` must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_light_period(&self, ctx: &ControlContext<'_>) -> bool {
        ctx.previous.u_lamp > 0.0 || ctx.disturbance.i_glob > self.light_threshold
    }

    pub fn lamps_on(&self, hour: f64, i_glob: f64, daily_radiation: f64) -> bool {
        hour >= self.lamp_on && hour < self.lamp_off && i_glob <= self.rad_cutoff && daily_radiation <= self.daily_rad_cutoff
    }
}

/// The baseline's action. Pure in `ctx`; every output lies within the actuator bounds.
pub fn rule_based_action(ctx: &ControlContext<'_>, cfg: &RuleBasedConfig) -> Controls {
    let d = &ctx.disturbance;
    let (t, rh) = (ctx.t_air, ctx.rh);
    let light = cfg.is_light_period(ctx);
    let sp = if light { cfg.t_set_light } else { cfg.t_set_dark };

    let lamp = cfg.lamps_on(ctx.clock.hour_of_day(), d.i_glob, ctx.daily_radiation);
    let u_lamp = if lamp { Controls::MAX[4] } else { 0.0 };

    let u_co2 = if light {
        Controls::MAX[1] * p_control(cfg.co2_setpoint - ctx.co2_ppm, cfg.band_co2, 1.0)
    } else {
        0.0
    };

    let u_boil = Controls::MAX[0] * p_control(sp - t, cfg.band_heat, 1.0);

    let humid = p_control(rh - cfg.rh_threshold, cfg.band_vent_rh, 1.0);
    let open = p_control(t - (sp + cfg.vent_open_offset), cfg.band_vent_t, 1.0).max(humid);
    let close_at = sp + cfg.vent_close_offset;
    let u_vent = if open > 0.0 {
        open
    } else if t < close_at {
        ctx.previous.u_vent.min(1.0 - p_control(close_at - t, cfg.band_vent_t, 1.0))
    } else {
        ctx.previous.u_vent
    };

    let thr = if light { cfg.thscr_out_day } else { cfg.thscr_out_night };
    let close_scr = p_control(thr - d.t_out, cfg.band_thscr, 1.0);
    let open_scr = p_control(t - (sp + cfg.thscr_open_offset), cfg.band_thscr, 1.0)
        .max(p_control(rh - cfg.rh_threshold, cfg.band_vent_rh, 1.0));
    let u_thscr = close_scr * (1.0 - open_scr);

    let u_blscr = if lamp && d.i_glob <= cfg.light_threshold { 1.0 } else { 0.0 };

    Controls {
        u_boil,
        u_co2,
        u_thscr,
        u_vent: u_vent.clamp(0.0, 1.0),
        u_lamp,
        u_blscr,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RuleBasedController {
    pub config: RuleBasedConfig,
}

impl RuleBasedController {
    pub fn new(config: RuleBasedConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }
}

impl Controller for RuleBasedController {
    fn act(&mut self, ctx: &ControlContext<'_>) -> Result<[f64; CONTROL_LEN]> {
        Ok(rule_based_action(ctx, &self.config).to_array())
    }
}
