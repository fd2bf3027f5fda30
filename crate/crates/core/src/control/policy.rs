//! Affine policy with logistic squashing: `u = lo + (hi − lo) · σ(W z + b)`,
//! `z = (obs − center) / scale`.

use alloc::vec::Vec;

use super::{ControlContext, Controller};
use crate::error::{Error, Result};
use crate::math;
use crate::model::observe::ObservationConfig;
use crate::model::{Controls, CONTROL_LEN};

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    obs_len: usize,
    /// `[W (row-major, CONTROL_LEN × obs_len) | b (CONTROL_LEN)]`.
    theta: Vec<f64>,
    center: Vec<f64>,
    scale: Vec<f64>,
}

/// Length of θ for an observation of `obs_len` slots.
pub const fn theta_len(obs_len: usize) -> usize {
    CONTROL_LEN * obs_len + CONTROL_LEN
}

impl PolicyParams {
    pub fn new(theta: Vec<f64>, center: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        let obs_len = center.len();
        if scale.len() != obs_len {
            return Err(Error::Dimension {
                expected: obs_len,
                actual: scale.len(),
            });
        }
        if theta.len() != theta_len(obs_len) {
            return Err(Error::Dimension {
                expected: theta_len(obs_len),
                actual: theta.len(),
            });
        }
        if let Some(v) = theta.iter().chain(&center).find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                field: "theta",
                value: *v,
            });
        }
        if let Some(v) = scale.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidConfig(alloc::format!(
                "normalization scale must be > 0, got {v}"
            )));
        }
        Ok(Self {
            obs_len,
            theta,
            center,
            scale,
        })
    }

    /// Policy over `config` with the layout's default normalization.
    pub fn for_observation(config: &ObservationConfig, theta: Vec<f64>) -> Result<Self> {
        let (center, scale) = config.normalization();
        Self::new(theta, center, scale)
    }

    pub fn zeros(config: &ObservationConfig) -> Self {
        let theta = alloc::vec![0.0; theta_len(config.len())];
        Self::for_observation(config, theta).expect("default normalization is valid")
    }

    pub fn obs_len(&self) -> usize {
        self.obs_len
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// Same normalization, different θ.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(theta, self.center.clone(), self.scale.clone())
    }

    pub fn weight(&self, actuator: usize, slot: usize) -> f64 {
        self.theta[actuator * self.obs_len + slot]
    }

    pub fn bias(&self, actuator: usize) -> f64 {
        self.theta[CONTROL_LEN * self.obs_len + actuator]
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + math::exp(-x))
}

/// Deterministic action for `obs`; always within the actuator bounds.
pub fn policy_act(params: &PolicyParams, obs: &[f64]) -> Result<Controls> {
    if obs.len() != params.obs_len {
        return Err(Error::Dimension {
            expected: params.obs_len,
            actual: obs.len(),
        });
    }
    let n = params.obs_len;
    let mut u = [0.0; CONTROL_LEN];
    for (a, out) in u.iter_mut().enumerate() {
        let row = &params.theta[a * n..(a + 1) * n];
        let mut s = params.bias(a);
        for j in 0..n {
            s += row[j] * ((obs[j] - params.center[j]) / params.scale[j]);
        }
        let (lo, hi) = (Controls::MIN[a], Controls::MAX[a]);
        let sig = logistic(s);
        *out = (lo + (hi - lo) * sig).clamp(lo, hi);
    }
    Ok(Controls::from_array(u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyController {
    pub params: PolicyParams,
}

impl PolicyController {
    pub fn new(params: PolicyParams) -> Self {
        Self { params }
    }
}

impl Controller for PolicyController {
    fn act(&mut self, ctx: &ControlContext<'_>) -> Result<[f64; CONTROL_LEN]> {
        Ok(policy_act(&self.params, ctx.observation)?.to_array())
    }
}
