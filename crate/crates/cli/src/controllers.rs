//! Controller specs as accepted on the command line:
//! `rule_based`, `policy:<artifact.json>`, `constant:<u_boil,u_co2,u_thscr,u_vent,u_lamp,u_blscr>`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use glasshouse_core::model::CONTROL_LEN;
use glasshouse_core::{
    ConstantController, ControlContext, Controller, ObservationConfig, PolicyController, RuleBasedController,
};

use crate::error::{Error, Result};
use crate::policy_io::load_policy;

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    RuleBased,
    Policy(PathBuf),
    Constant([f64; CONTROL_LEN]),
}

impl FromStr for ControllerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rule_based" {
            return Ok(ControllerSpec::RuleBased);
        }
        if let Some(path) = s.strip_prefix("policy:") {
            if path.is_empty() {
                return Err(Error::Invalid("policy: needs an artifact path".into()));
            }
            return Ok(ControllerSpec::Policy(PathBuf::from(path)));
        }
        if let Some(list) = s.strip_prefix("constant:") {
            let vals: Vec<f64> = list
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Invalid(format!("constant controller `{list}`: {e}")))?;
            let u: [f64; CONTROL_LEN] = vals.try_into().map_err(|v: Vec<f64>| {
                Error::Invalid(format!("constant controller needs {CONTROL_LEN} values, got {}", v.len()))
            })?;
            return Ok(ControllerSpec::Constant(u));
        }
        Err(Error::Invalid(format!(
            "unknown controller `{s}` (expected rule_based, policy:<path> or constant:<u1,...,u6>)"
        )))
    }
}

impl fmt::Display for ControllerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerSpec::RuleBased => f.write_str("rule_based"),
            ControllerSpec::Policy(p) => write!(f, "policy:{}", p.display()),
            ControllerSpec::Constant(u) => {
                let parts: Vec<String> = u.iter().map(|v| v.to_string()).collect();
                write!(f, "constant:{}", parts.join(","))
            }
        }
    }
}

impl ControllerSpec {
    /// Builds the controller; policy artifacts are checked against `obs`.
    /// Relative artifact paths resolve against `base_dir`.
    pub fn load(&self, obs: &ObservationConfig, base_dir: &Path) -> Result<AnyController> {
        Ok(match self {
            ControllerSpec::RuleBased => AnyController::RuleBased(RuleBasedController::default()),
            ControllerSpec::Policy(p) => {
                AnyController::Policy(PolicyController::new(load_policy(&base_dir.join(p), obs)?))
            }
            ControllerSpec::Constant(u) => AnyController::Constant(ConstantController::new(*u)),
        })
    }
}

/// Closed set of controllers, cheap to clone into worker threads.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyController {
    RuleBased(RuleBasedController),
    Policy(PolicyController),
    Constant(ConstantController),
}

impl Controller for AnyController {
    fn act(&mut self, ctx: &ControlContext<'_>) -> glasshouse_core::Result<[f64; CONTROL_LEN]> {
        match self {
            AnyController::RuleBased(c) => c.act(ctx),
            AnyController::Policy(c) => c.act(ctx),
            AnyController::Constant(c) => c.act(ctx),
        }
    }

    fn reset(&mut self) {
        match self {
            AnyController::RuleBased(c) => c.reset(),
            AnyController::Policy(c) => c.reset(),
            AnyController::Constant(c) => c.reset(),
        }
    }
}
