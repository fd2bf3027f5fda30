//! Model parameters and their nominal values.
//!
//! | name | default | unit | role |
//! |------|---------|------|------|
//! | `c_air` | 30 000 | J m⁻² K⁻¹ | air heat capacity |
//! | `c_pipe` | 10 000 | J m⁻² K⁻¹ | pipe heat capacity |
//! | `eta_glob` | 0.5 | - | solar heat fraction absorbed by the air |
//! | `k_pipe` | 5 | W m⁻² K⁻¹ | pipe-to-air transfer |
//! | `eta_lamp_heat` | 0.7 | - | lamp input released as heat |
//! | `u_cov` | 6 | W m⁻² K⁻¹ | cover transmission loss |
//! | `rho_scr` | 0.7 | - | loss reduction of a closed thermal screen |
//! | `h_air` | 4 | m | mean air column height |
//! | `l_leak` | 1e-4 | m s⁻¹ per m | leakage exchange |
//! | `l_vent` | 5e-3 | m s⁻¹ per m | vent exchange at full aperture |
//! | `c_wind` | 0.1 | s m⁻¹ | wind enhancement of exchange |
//! | `m_co2_conv` | 1.5 | mg CO₂ per mg CH₂O | assimilation CO₂ demand |
//! | `c_vp` | 4.0 | m | vapor capacity of the air column |
//! | `c_trans` | 0.015 | Pa m s⁻¹ per W m⁻² | radiation-driven transpiration |
//! | `k_cond` | 5e-4 | m s⁻¹ | condensation on the cover |
//! | `eps_light` | 0.06 | mg CH₂O J⁻¹ | light-use efficiency |
//! | `eta_par_sun` | 0.45 | - | PAR fraction of global radiation |
//! | `eta_par_lamp` | 0.35 | - | PAR fraction of lamp input |
//! | `k_co2` | 600 | ppm | CO₂ half-saturation |
//! | `t_opt` | 22 | °C | photosynthesis optimum |
//! | `t_width` | 12 | °C | half-width of the temperature response |
//! | `c_ab` | 0.5 | - | assimilate share of fruit growth |
//! | `m_resp` | 1e-7 | s⁻¹ | fruit maintenance respiration at 25 °C |
//! | `q10` | 2 | - | respiration temperature sensitivity |
//! | `tau_24` | 86 400 | s | canopy temperature filter constant |
//! | `s_start` | 30 | °C·day | temperature sum at fruit set |
//! | `s_harvest` | 250 | °C·day | temperature sum at first harvest |
//! | `h_rate` | 5e-7 | s⁻¹ | harvest rate |

use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub const PARAM_COUNT: usize = 28;

macro_rules! params {
    ($($variant:ident => $name:literal = $value:expr),+ $(,)?) => {
        /// Named model parameter.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[repr(usize)]
        pub enum Param {
            $($variant),+
        }

        impl Param {
            pub const ALL: [Param; PARAM_COUNT] = [$(Param::$variant),+];
            const NAMES: [&'static str; PARAM_COUNT] = [$($name),+];
            const DEFAULTS: [f64; PARAM_COUNT] = [$($value),+];
        }
    };
}

params! {
    CAir => "c_air" = 30_000.0,
    CPipe => "c_pipe" = 10_000.0,
    EtaGlob => "eta_glob" = 0.5,
    KPipe => "k_pipe" = 5.0,
    EtaLampHeat => "eta_lamp_heat" = 0.7,
    UCov => "u_cov" = 6.0,
    RhoScr => "rho_scr" = 0.7,
    HAir => "h_air" = 4.0,
    LLeak => "l_leak" = 1e-4,
    LVent => "l_vent" = 5e-3,
    CWind => "c_wind" = 0.1,
    MCo2Conv => "m_co2_conv" = 1.5,
    CVp => "c_vp" = 4.0,
    CTrans => "c_trans" = 0.015,
    KCond => "k_cond" = 5e-4,
    EpsLight => "eps_light" = 0.06,
    EtaParSun => "eta_par_sun" = 0.45,
    EtaParLamp => "eta_par_lamp" = 0.35,
    KCo2 => "k_co2" = 600.0,
    TOpt => "t_opt" = 22.0,
    TWidth => "t_width" = 12.0,
    CAb => "c_ab" = 0.5,
    MResp => "m_resp" = 1e-7,
    Q10 => "q10" = 2.0,
    Tau24 => "tau_24" = 86_400.0,
    SStart => "s_start" = 30.0,
    SHarvest => "s_harvest" = 250.0,
    HRate => "h_rate" = 5e-7,
}

impl Param {
    /// The crop subset randomized when uncertainty is enabled.
    pub const CROP: [Param; 12] = [
        Param::EpsLight,
        Param::KCo2,
        Param::TOpt,
        Param::TWidth,
        Param::CAb,
        Param::MResp,
        Param::Q10,
        Param::SStart,
        Param::SHarvest,
        Param::HRate,
        Param::MCo2Conv,
        Param::CTrans,
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    pub fn default_value(self) -> f64 {
        Self::DEFAULTS[self as usize]
    }

    pub fn from_name(name: &str) -> Result<Param> {
        Self::NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| Error::UnknownParam(name.into()))
    }
}

/// A full assignment of parameter values, indexed by [`Param`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamValues([f64; PARAM_COUNT]);

impl ParamValues {
    pub fn nominal() -> Self {
        Self(Param::DEFAULTS)
    }

    pub fn as_array(&self) -> &[f64; PARAM_COUNT] {
        &self.0
    }

    pub fn validate(&self) -> Result<()> {
        for p in Param::ALL {
            let v = self[p];
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(alloc::format!(
                    "parameter `{}` must be finite and > 0, got {v}",
                    p.name()
                )));
            }
        }
        Ok(())
    }
}

impl Default for ParamValues {
    fn default() -> Self {
        Self::nominal()
    }
}

impl Index<Param> for ParamValues {
    type Output = f64;

    #[inline]
    fn index(&self, p: Param) -> &f64 {
        &self.0[p as usize]
    }
}

impl IndexMut<Param> for ParamValues {
    #[inline]
    fn index_mut(&mut self, p: Param) -> &mut f64 {
        &mut self.0[p as usize]
    }
}

/// Nominal parameter values plus the uncertainty specification.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    values: ParamValues,
    randomized: Vec<Param>,
    delta: f64,
}

impl ParameterSet {
    /// `randomized` is sorted and deduplicated so draw order is canonical.
    pub fn new(values: ParamValues, randomized: &[Param], delta: f64) -> Result<Self> {
        values.validate()?;
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidConfig(alloc::format!(
                "uncertainty delta must lie in [0, 1), got {delta}"
            )));
        }
        let mut randomized = randomized.to_vec();
        randomized.sort_unstable();
        randomized.dedup();
        Ok(Self {
            values,
            randomized,
            delta,
        })
    }

    /// Nominal values, no uncertainty.
    pub fn nominal() -> Self {
        Self {
            values: ParamValues::nominal(),
            randomized: Vec::new(),
            delta: 0.0,
        }
    }

    pub fn values(&self) -> &ParamValues {
        &self.values
    }

    pub fn randomized(&self) -> &[Param] {
        &self.randomized
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(self.values[Param::from_name(name)?])
    }
}
