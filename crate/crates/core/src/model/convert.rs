//! Unit conversions between state variables and the quantities growers read.

use crate::math;

/// Universal gas constant, J mol⁻¹ K⁻¹.
pub const GAS_CONSTANT: f64 = 8.314;
/// Molar mass of CO₂, kg mol⁻¹.
pub const CO2_MOLAR_MASS: f64 = 0.04401;
/// Atmospheric pressure, Pa.
pub const ATM_PRESSURE: f64 = 101_325.0;
const KELVIN: f64 = 273.15;

/// Magnus saturation vapor pressure, Pa.
#[inline]
pub fn saturation_vapor_pressure(t_air: f64) -> f64 {
    610.78 * math::exp(17.27 * t_air / (t_air + 237.3))
}

/// Relative humidity in percent. Supersaturation is reported as > 100, not clipped.
#[inline]
pub fn relative_humidity(vp_air: f64, t_air: f64) -> f64 {
    100.0 * vp_air / saturation_vapor_pressure(t_air)
}

/// Vapor pressure (Pa) for a relative humidity (%) at temperature `t_air`.
#[inline]
pub fn vapor_pressure(rh: f64, t_air: f64) -> f64 {
    rh / 100.0 * saturation_vapor_pressure(t_air)
}

/// Ideal-gas conversion from mg m⁻³ to ppm (µmol mol⁻¹).
#[inline]
pub fn co2_mgm3_to_ppm(c: f64, t_air: f64) -> f64 {
    c * GAS_CONSTANT * (t_air + KELVIN) / (CO2_MOLAR_MASS * ATM_PRESSURE)
}

/// Inverse of [`co2_mgm3_to_ppm`].
#[inline]
pub fn co2_ppm_to_mgm3(ppm: f64, t_air: f64) -> f64 {
    ppm * CO2_MOLAR_MASS * ATM_PRESSURE / (GAS_CONSTANT * (t_air + KELVIN))
}
