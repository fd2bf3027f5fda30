//! Reduced-order greenhouse crop-production simulation.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every numeric part
//! of the benchmark: the continuous dynamics and their fixed-step
//! discretization, the episode environment with its reward stack and
//! parameter randomization, the disturbance series utilities, and the
//! controllers (rule-based baseline, affine policy, cross-entropy trainer).
//!
//! File formats, threading and the command line live in the `glasshouse`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod clock;
pub mod control;
pub mod env;
pub mod error;
pub mod integrator;
mod math;
pub mod model;
pub mod weather;

pub use clock::SimClock;
pub use control::{
    cem::{CemConfig, CemOutcome, CrossEntropy, IterationStats},
    policy::{PolicyController, PolicyParams},
    rule_based::{RuleBasedConfig, RuleBasedController},
    ConstantController, ControlContext, Controller,
};
pub use env::{
    config::{ConstraintBounds, EnvConfig, Prices, ResampleMode, UncertaintyConfig},
    reward::{EpisodeMetrics, RewardBreakdown},
    Env, StepInfo, StepResult,
};
pub use error::{Error, Result};
pub use integrator::{IntegratorConfig, Method};
pub use model::{
    observe::ObservationConfig, params::Param, params::ParamValues, params::ParameterSet,
    Controls, Disturbance, State,
};
pub use weather::WeatherSeries;
