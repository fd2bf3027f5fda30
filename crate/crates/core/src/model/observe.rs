//! Controller-visible observation vector.
//!
//! Slot order is fixed: state (7), time (4), control (6), weather (5), then
//! `forecast_horizon` future weather rows of 5 values each. Disabled groups
//! are skipped.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::{Controls, Disturbance, State, CONTROL_LEN, DISTURBANCE_LEN};
use crate::clock::SimClock;
use crate::error::{Error, Result};
use crate::math;

pub const STATE_GROUP_LEN: usize = 7;
pub const TIME_GROUP_LEN: usize = 4;

/// Which observation groups are enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct ObservationConfig {
    pub state: bool,
    pub time: bool,
    pub control: bool,
    pub weather: bool,
    /// Number of future weather rows appended; 0 disables the forecast group.
    pub forecast_horizon: usize,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self {
            state: true,
            time: true,
            control: true,
            weather: true,
            forecast_horizon: 0,
        }
    }
}

impl ObservationConfig {
    pub fn state_only() -> Self {
        Self {
            state: true,
            time: false,
            control: false,
            weather: false,
            forecast_horizon: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.state || self.time || self.control || self.weather || self.forecast_horizon > 0) {
            return Err(Error::InvalidConfig("observation config enables no groups".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let mut n = 0;
        if self.state {
            n += STATE_GROUP_LEN;
        }
        if self.time {
            n += TIME_GROUP_LEN;
        }
        if self.control {
            n += CONTROL_LEN;
        }
        if self.weather {
            n += DISTURBANCE_LEN;
        }
        n + DISTURBANCE_LEN * self.forecast_horizon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stable 64-bit FNV-1a fingerprint of the layout, used to pair policies with environments.
    pub fn fingerprint(&self) -> u64 {
        let flags = [self.state, self.time, self.control, self.weather];
        let mut bytes = [0u8; 4 + 8];
        for (b, f) in bytes.iter_mut().zip(flags) {
            *b = f as u8;
        }
        bytes[4..].copy_from_slice(&(self.forecast_horizon as u64).to_le_bytes());
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in b"obs-layout-v1".iter().chain(bytes.iter()) {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h
    }

    /// Per-slot `(center, scale)` used to normalize observations before a policy sees them.
    pub fn normalization(&self) -> (Vec<f64>, Vec<f64>) {
        const STATE: [(f64, f64); STATE_GROUP_LEN] = [
            (20.0, 10.0),
            (800.0, 500.0),
            (70.0, 20.0),
            (30.0, 20.0),
            (0.5, 0.5),
            (20.0, 10.0),
            (100.0, 100.0),
        ];
        const WEATHER: [(f64, f64); DISTURBANCE_LEN] =
            [(250.0, 250.0), (10.0, 10.0), (75.0, 20.0), (410.0, 50.0), (4.0, 4.0)];
        let mut slots: Vec<(f64, f64)> = Vec::with_capacity(self.len());
        if self.state {
            slots.extend_from_slice(&STATE);
        }
        if self.time {
            slots.extend_from_slice(&[(0.0, 1.0); TIME_GROUP_LEN]);
        }
        if self.control {
            slots.extend(Controls::MAX.iter().map(|m| (m / 2.0, m / 2.0)));
        }
        if self.weather {
            slots.extend_from_slice(&WEATHER);
        }
        for _ in 0..self.forecast_horizon {
            slots.extend_from_slice(&WEATHER);
        }
        slots.into_iter().unzip()
    }
}

/// `(sin, cos)` encodings of hour-of-day and day-of-year.
pub fn time_features(clock: &SimClock) -> [f64; TIME_GROUP_LEN] {
    let h = TAU * clock.hour_of_day() / 24.0;
    let d = TAU * f64::from(clock.day_of_year() - 1) / 365.0;
    [math::sin(h), math::cos(h), math::sin(d), math::cos(d)]
}

/// Appends the observation to `out` (cleared first).
pub fn observe_into(
    out: &mut Vec<f64>,
    x: &State,
    u: &Controls,
    d: &Disturbance,
    clock: &SimClock,
    forecast: &[Disturbance],
    config: &ObservationConfig,
) -> Result<()> {
    config.validate()?;
    if forecast.len() != config.forecast_horizon {
        return Err(Error::Dimension {
            expected: config.forecast_horizon,
            actual: forecast.len(),
        });
    }
    out.clear();
    out.reserve(config.len());
    if config.state {
        out.extend_from_slice(&[
            x.t_air,
            x.co2_ppm(),
            x.rh(),
            x.t_pipe,
            x.w_fruit,
            x.t_can24,
            x.t_can_sum,
        ]);
    }
    if config.time {
        out.extend_from_slice(&time_features(clock));
    }
    if config.control {
        out.extend_from_slice(&u.to_array());
    }
    if config.weather {
        out.extend_from_slice(&d.to_array());
    }
    for row in forecast {
        out.extend_from_slice(&row.to_array());
    }
    Ok(())
}

/// Builds the observation vector for the given inputs. Pure.
pub fn observe(
    x: &State,
    u: &Controls,
    d: &Disturbance,
    clock: &SimClock,
    forecast: &[Disturbance],
    config: &ObservationConfig,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    observe_into(&mut out, x, u, d, clock, forecast, config)?;
    Ok(out)
}
