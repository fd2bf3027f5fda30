//! Fixed-step discretization `x_{k+1} = f(x_k, u_k, d_k, p)` of the model.
//!
//! Each step of `dt` seconds is split into `substeps` equal explicit
//! sub-steps. Inputs are held constant through the whole step. After every
//! sub-step, CO₂, vapor pressure and fruit weight are clipped at zero.

use crate::error::{Error, Result};
use crate::model::dynamics::{rates, Forcing};
use crate::model::params::ParamValues;
use crate::model::{Controls, Disturbance, State, STATE_LEN};

/// Largest admissible sub-step, s. The fastest mode of the model (full vent,
/// strong wind) has a time constant of a few hundred seconds.
pub const MAX_SUBSTEP: f64 = 60.0;

/// Sub-step count of the dense reference used by [`convergence_order`].
pub const REFERENCE_SUBSTEPS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub substeps: u32,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 300.0,
            substeps: 20,
            method: Method::Rk4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("dt must be > 0, got {}", self.dt)));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be >= 1".into()));
        }
        let h = self.dt / f64::from(self.substeps);
        if h > MAX_SUBSTEP {
            return Err(Error::InvalidConfig(alloc::format!(
                "sub-step {h} s exceeds the stability limit of {MAX_SUBSTEP} s"
            )));
        }
        Ok(())
    }
}

#[inline]
fn axpy(x: &[f64; STATE_LEN], a: f64, k: &[f64; STATE_LEN]) -> [f64; STATE_LEN] {
    let mut out = *x;
    for i in 0..STATE_LEN {
        out[i] += a * k[i];
    }
    out
}

#[inline]
fn rk4_substep(x: &[f64; STATE_LEN], h: f64, f: &Forcing, p: &ParamValues) -> [f64; STATE_LEN] {
    let k1 = rates(x, f, p);
    let k2 = rates(&axpy(x, 0.5 * h, &k1), f, p);
    let k3 = rates(&axpy(x, 0.5 * h, &k2), f, p);
    let k4 = rates(&axpy(x, h, &k3), f, p);
    let mut out = *x;
    for i in 0..STATE_LEN {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Advances the state by exactly `cfg.dt` seconds.
///
/// `cfg` is assumed valid; the public entry points validate it.
pub(crate) fn advance(
    x: &State,
    u: &Controls,
    d: &Disturbance,
    p: &ParamValues,
    cfg: &IntegratorConfig,
) -> Result<State> {
    let forcing = Forcing::new(u, d, p);
    let h = cfg.dt / f64::from(cfg.substeps);
    let mut s = x.to_array();
    for sub in 0..cfg.substeps {
        s = match cfg.method {
            Method::Rk4 => rk4_substep(&s, h, &forcing, p),
            Method::Euler => axpy(&s, h, &rates(&s, &forcing, p)),
        };
        for i in State::NON_NEGATIVE {
            s[i] = s[i].max(0.0);
        }
        if let Some(i) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                field: State::FIELD_NAMES[i],
                substep: sub,
            });
        }
    }
    Ok(State::from_array(s))
}

/// One model step. Deterministic: equal arguments give bit-identical states.
pub fn step(x: &State, u: &Controls, d: &Disturbance, p: &ParamValues, cfg: &IntegratorConfig) -> Result<State> {
    cfg.validate()?;
    x.check_finite()?;
    crate::model::check_all(&Controls::FIELD_NAMES, &u.to_array())?;
    crate::model::check_all(&Disturbance::FIELD_NAMES, &d.to_array())?;
    advance(x, u, d, p, cfg)
}

/// Result of a Richardson-style order estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderEstimate {
    /// Every coarse solution matched the reference exactly.
    Exact,
    Order(f64),
}

/// Maximum scaled error of each coarse solution against the dense reference.
pub fn step_errors(
    x: &State,
    u: &Controls,
    d: &Disturbance,
    p: &ParamValues,
    dt: f64,
    method: Method,
    substeps: &[u32],
) -> Result<alloc::vec::Vec<f64>> {
    let reference = step(
        x,
        u,
        d,
        p,
        &IntegratorConfig {
            dt,
            substeps: REFERENCE_SUBSTEPS,
            method: Method::Rk4,
        },
    )?
    .to_array();
    substeps
        .iter()
        .map(|&n| {
            let coarse = step(x, u, d, p, &IntegratorConfig { dt, substeps: n, method })?.to_array();
            Ok(coarse
                .iter()
                .zip(reference.iter())
                .map(|(c, r)| (c - r).abs() / r.abs().max(1.0))
                .fold(0.0, f64::max))
        })
        .collect()
}

/// Estimates the convergence order of `method` from sub-step counts 5, 10 and 20
/// against a dense RK4 reference; the order is the least-squares slope of
/// `log(error)` against `log(h)`.
pub fn convergence_order(
    x: &State,
    u: &Controls,
    d: &Disturbance,
    p: &ParamValues,
    dt: f64,
    method: Method,
) -> Result<OrderEstimate> {
    const COUNTS: [u32; 3] = [5, 10, 20];
    let errors = step_errors(x, u, d, p, dt, method, &COUNTS)?;
    let pts: alloc::vec::Vec<(f64, f64)> = COUNTS
        .iter()
        .zip(errors.iter())
        .filter(|(_, e)| **e > 0.0)
        .map(|(n, e)| (crate::math::ln(dt / f64::from(*n)), crate::math::ln(*e)))
        .collect();
    if pts.len() < 2 {
        return Ok(OrderEstimate::Exact);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(OrderEstimate::Order(sxy / sxx))
}
