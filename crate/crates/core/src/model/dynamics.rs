//! Right-hand side of the reduced-order greenhouse ODE, all rates per second.
//!
//! ```text
//! C_air dT/dt  = η_glob I + k_pipe (T_pipe − T) + η_lh u_lamp
//!                − U_cov (1 − ρ_scr u_thscr)(T − T_out) − ρ c_p φ (T − T_out)
//! C_pipe dT_pipe/dt = u_boil − k_pipe (T_pipe − T)
//! h_air dC/dt  = u_co2 − M f_phot − φ (C − C_out)
//! c_vp dVP/dt  = c_trans PAR − φ (VP − VP_out) − k_cond max(0, VP − VPsat(T_out))
//! dW/dt        = c_ab f_phot [S > S_start] − m_resp W Q10^((T−25)/10) − h W [S > S_harvest]
//! dT24/dt      = (T − T24) / τ_24
//! dS/dt        = T / 86400
//! ```
//!
//! with `φ = h_air (l_leak + l_vent u_vent (1 + c_wind wind))` and
//! `f_phot = ε PAR · ppm/(ppm + K) · f_T(T)`.

use super::convert::{co2_mgm3_to_ppm, co2_ppm_to_mgm3, saturation_vapor_pressure, vapor_pressure};
use super::params::{Param, ParamValues};
use super::{check_all, Controls, Disturbance, State, STATE_LEN};
use crate::error::Result;
use crate::math;

/// Air density, kg m⁻³.
pub const AIR_DENSITY: f64 = 1.2;
/// Specific heat of air, J kg⁻¹ K⁻¹.
pub const AIR_HEAT_CAPACITY: f64 = 1005.0;
const SECONDS_PER_DAY: f64 = 86_400.0;
const MG_TO_KG: f64 = 1e-6;

/// Quantities that depend only on the held inputs of one step.
///
/// Built once per model step and reused by every sub-step, which is how the
/// zero-order hold on `u` and `d` is enforced.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Forcing {
    u: Controls,
    t_out: f64,
    i_glob: f64,
    phi_vent: f64,
    par_abs: f64,
    co2_out_mg: f64,
    vp_out: f64,
    vp_sat_out: f64,
}

impl Forcing {
    pub(crate) fn new(u: &Controls, d: &Disturbance, p: &ParamValues) -> Self {
        let phi_vent =
            p[Param::HAir] * (p[Param::LLeak] + p[Param::LVent] * u.u_vent * (1.0 + p[Param::CWind] * d.wind));
        Self {
            u: *u,
            t_out: d.t_out,
            i_glob: d.i_glob,
            phi_vent,
            par_abs: p[Param::EtaParSun] * d.i_glob + p[Param::EtaParLamp] * u.u_lamp,
            co2_out_mg: co2_ppm_to_mgm3(d.co2_out, d.t_out),
            vp_out: vapor_pressure(d.rh_out, d.t_out),
            vp_sat_out: saturation_vapor_pressure(d.t_out),
        }
    }
}

/// Gross assimilation, mg CH₂O m⁻² s⁻¹.
#[inline]
pub(crate) fn photosynthesis(t_air: f64, co2_air: f64, par_abs: f64, p: &ParamValues) -> f64 {
    if par_abs <= 0.0 {
        return 0.0;
    }
    let ppm = co2_mgm3_to_ppm(co2_air, t_air).max(0.0);
    let x = (t_air - p[Param::TOpt]) / p[Param::TWidth];
    let f_t = (1.0 - x * x).max(0.0);
    p[Param::EpsLight] * par_abs * (ppm / (ppm + p[Param::KCo2])) * f_t
}

#[inline]
pub(crate) fn rates(x: &[f64; STATE_LEN], f: &Forcing, p: &ParamValues) -> [f64; STATE_LEN] {
    let [t_air, t_pipe, co2_air, vp_air, t_can24, t_can_sum, w_fruit, _] = *x;
    let u = &f.u;

    let dt_out = t_air - f.t_out;
    let pipe_flux = p[Param::KPipe] * (t_pipe - t_air);
    let d_t_air = (p[Param::EtaGlob] * f.i_glob + pipe_flux + p[Param::EtaLampHeat] * u.u_lamp
        - p[Param::UCov] * (1.0 - p[Param::RhoScr] * u.u_thscr) * dt_out
        - AIR_DENSITY * AIR_HEAT_CAPACITY * f.phi_vent * dt_out)
        / p[Param::CAir];
    let d_t_pipe = (u.u_boil - pipe_flux) / p[Param::CPipe];

    let f_phot = photosynthesis(t_air, co2_air, f.par_abs, p);
    let d_co2 = (u.u_co2 - f_phot * p[Param::MCo2Conv] - f.phi_vent * (co2_air - f.co2_out_mg))
        / p[Param::HAir];

    let transpiration = p[Param::CTrans] * f.par_abs;
    let condensation = p[Param::KCond] * (vp_air - f.vp_sat_out).max(0.0);
    let d_vp = (transpiration - f.phi_vent * (vp_air - f.vp_out) - condensation) / p[Param::CVp];

    let fruit = w_fruit.max(0.0);
    let growth = if t_can_sum > p[Param::SStart] {
        p[Param::CAb] * f_phot * MG_TO_KG
    } else {
        0.0
    };
    let respiration = p[Param::MResp] * fruit * math::pow(p[Param::Q10], (t_air - 25.0) / 10.0);
    let harvest = if t_can_sum > p[Param::SHarvest] {
        p[Param::HRate] * fruit
    } else {
        0.0
    };

    [
        d_t_air,
        d_t_pipe,
        d_co2,
        d_vp,
        (t_air - t_can24) / p[Param::Tau24],
        t_air / SECONDS_PER_DAY,
        growth - respiration - harvest,
        harvest,
    ]
}

/// Time derivative of the state in per-second units. Pure and deterministic.
///
/// `u` is expected to be clamped already; every input must be finite.
pub fn derivative(x: &State, u: &Controls, d: &Disturbance, p: &ParamValues) -> Result<State> {
    check_all(&State::FIELD_NAMES, &x.to_array())?;
    check_all(&Controls::FIELD_NAMES, &u.to_array())?;
    check_all(&Disturbance::FIELD_NAMES, &d.to_array())?;
    let forcing = Forcing::new(u, d, p);
    Ok(State::from_array(rates(&x.to_array(), &forcing, p)))
}
