//! Controllers and the trainer that fits them.

pub mod cem;
pub mod policy;
pub mod rule_based;

use crate::clock::SimClock;
use crate::error::Result;
use crate::model::{Controls, Disturbance, CONTROL_LEN};

/// Everything a controller may look at before step `k`.
#[derive(Debug, Clone, Copy)]
pub struct ControlContext<'a> {
    pub observation: &'a [f64],
    pub t_air: f64,
    pub co2_ppm: f64,
    pub rh: f64,
    /// Weather row for the current step.
    pub disturbance: Disturbance,
    pub clock: SimClock,
    /// Radiation sum of the current day, MJ m⁻².
    pub daily_radiation: f64,
    /// Controls applied at the previous step (zero at episode start).
    pub previous: Controls,
}

pub trait Controller {
    /// Raw action for the current step; the environment clamps it.
    fn act(&mut self, ctx: &ControlContext<'_>) -> Result<[f64; CONTROL_LEN]>;

    /// Called at the start of each episode.
    fn reset(&mut self) {}
}

/// Proportional law `clip(direction · error / band, 0, 1)`.
#[inline]
pub fn p_control(error: f64, band: f64, direction: f64) -> f64 {
    debug_assert!(band > 0.0);
    (direction * error / band).clamp(0.0, 1.0)
}

/// Applies the same action every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantController {
    pub action: [f64; CONTROL_LEN],
}

impl ConstantController {
    pub fn new(action: [f64; CONTROL_LEN]) -> Self {
        Self { action }
    }
}

impl Controller for ConstantController {
    fn act(&mut self, _ctx: &ControlContext<'_>) -> Result<[f64; CONTROL_LEN]> {
        Ok(self.action)
    }
}
