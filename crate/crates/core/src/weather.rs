//! Disturbance trajectories: validation, resampling, synthetic generation,
//! daily radiation sums and perfect-foresight forecast windows.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::clock::unix_midnight;
use crate::error::{Error, Result};
use crate::math;
use crate::model::Disturbance;

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Uniformly spaced weather rows. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    start: i64,
    dt: f64,
    rows: Vec<Disturbance>,
}

impl WeatherSeries {
    /// `start` is the Unix timestamp (UTC) of the first row.
    pub fn new(start: i64, dt: f64, rows: Vec<Disturbance>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidWeather(format!("spacing must be > 0, got {dt}")));
        }
        if rows.is_empty() {
            return Err(Error::InvalidWeather("series has no rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            row.validate()
                .map_err(|e| Error::InvalidWeather(format!("row {}: {e}", i + 1)))?;
        }
        Ok(Self { start, dt, rows })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn rows(&self) -> &[Disturbance] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, k: usize) -> &Disturbance {
        &self.rows[k]
    }

    /// Rows per 24 h, if the spacing divides a day.
    pub fn rows_per_day(&self) -> Option<usize> {
        let n = SECONDS_PER_DAY / self.dt;
        (n >= 1.0 && n == math::round(n)).then_some(n as usize)
    }

    /// Radiation sum over day `day` (counted from the series start), MJ m⁻² d⁻¹.
    pub fn daily_radiation_sum(&self, day: usize) -> Result<f64> {
        let per_day = self
            .rows_per_day()
            .ok_or_else(|| Error::InvalidWeather(format!("spacing {} s does not divide a day", self.dt)))?;
        let lo = day * per_day;
        let hi = lo + per_day;
        if hi > self.rows.len() {
            return Err(Error::PartialDay {
                day,
                required: per_day,
                available: self.rows.len().saturating_sub(lo),
            });
        }
        let joules: f64 = self.rows[lo..hi].iter().map(|r| r.i_glob * self.dt).sum();
        Ok(joules / 1e6)
    }

    /// The `horizon` rows following row `k` (perfect foresight).
    pub fn forecast(&self, k: usize, horizon: usize) -> Result<&[Disturbance]> {
        if horizon == 0 {
            return Ok(&[]);
        }
        let end = k + 1 + horizon;
        if end > self.rows.len() {
            return Err(Error::ForecastOutOfRange {
                start: k + 1,
                end,
                len: self.rows.len(),
            });
        }
        Ok(&self.rows[k + 1..end])
    }

    /// Resamples to `target_dt`, which must be an integer multiple or divisor of the spacing.
    ///
    /// Downsampling averages complete windows (a trailing partial window is
    /// dropped). Upsampling interpolates linearly and keeps every original
    /// row, including both endpoints.
    pub fn resample(&self, target_dt: f64) -> Result<Self> {
        if !(target_dt.is_finite() && target_dt > 0.0) {
            return Err(Error::InvalidWeather(format!("target spacing must be > 0, got {target_dt}")));
        }
        if target_dt == self.dt {
            return Ok(self.clone());
        }
        let integral = |r: f64| r >= 1.0 && (r - math::round(r)).abs() < 1e-9;
        let down = target_dt / self.dt;
        let up = self.dt / target_dt;
        let rows = if integral(down) {
            let m = math::round(down) as usize;
            if self.rows.len() < m {
                return Err(Error::InvalidWeather(format!(
                    "series of {} rows is shorter than one {target_dt} s window",
                    self.rows.len()
                )));
            }
            self.rows
                .chunks_exact(m)
                .map(|w| {
                    let mut acc = [0.0; 5];
                    for r in w {
                        for (a, v) in acc.iter_mut().zip(r.to_array()) {
                            *a += v;
                        }
                    }
                    Disturbance::from_array(acc.map(|a| a / m as f64))
                })
                .collect()
        } else if integral(up) {
            let m = math::round(up) as usize;
            let mut rows = Vec::with_capacity((self.rows.len() - 1) * m + 1);
            for pair in self.rows.windows(2) {
                let (a, b) = (pair[0].to_array(), pair[1].to_array());
                for j in 0..m {
                    let f = j as f64 / m as f64;
                    let mut v = [0.0; 5];
                    for i in 0..5 {
                        v[i] = a[i] + (b[i] - a[i]) * f;
                    }
                    v[0] = v[0].max(0.0);
                    rows.push(Disturbance::from_array(v));
                }
            }
            rows.push(*self.rows.last().expect("non-empty"));
            rows
        } else {
            return Err(Error::InvalidWeather(format!(
                "cannot resample {} s to {target_dt} s: spacings must divide one another",
                self.dt
            )));
        };
        Self::new(self.start, target_dt, rows)
    }
}

/// Shape of a synthetic weather trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields, default))]
pub struct SyntheticProfile {
    /// Unix timestamp of the first row; should be a UTC midnight.
    pub start: i64,
    pub dt: f64,
    /// Clear-sky noon radiation, W m⁻².
    pub peak_radiation: f64,
    pub sunrise_hour: f64,
    pub day_length_hours: f64,
    /// Daily cloud factor is drawn uniformly from `[cloud_min, 1]`.
    pub cloud_min: f64,
    pub t_mean: f64,
    pub t_amplitude: f64,
    /// Daily mean drifts by up to this much between days, °C.
    pub t_day_jitter: f64,
    pub t_peak_hour: f64,
    pub rh_mean: f64,
    pub rh_amplitude: f64,
    pub co2: f64,
    pub wind_mean: f64,
    pub wind_sd: f64,
    /// Correlation time of the wind process, s.
    pub wind_tau: f64,
}

impl SyntheticProfile {
    /// Dutch early spring: 8 ± 5 °C, 12.5 h days, 500 W m⁻² clear-sky noon.
    pub fn spring() -> Self {
        Self {
            start: unix_midnight(2010, 3, 1),
            dt: 300.0,
            peak_radiation: 500.0,
            sunrise_hour: 6.75,
            day_length_hours: 12.5,
            cloud_min: 0.45,
            t_mean: 8.0,
            t_amplitude: 5.0,
            t_day_jitter: 2.0,
            t_peak_hour: 15.0,
            rh_mean: 80.0,
            rh_amplitude: 10.0,
            co2: 410.0,
            wind_mean: 4.0,
            wind_sd: 1.5,
            wind_tau: 6.0 * 3600.0,
        }
    }

    /// Cold, dark winter nights and short days.
    pub fn winter() -> Self {
        Self {
            start: unix_midnight(2010, 1, 10),
            peak_radiation: 250.0,
            sunrise_hour: 8.5,
            day_length_hours: 8.0,
            t_mean: 1.0,
            t_amplitude: 3.0,
            rh_mean: 88.0,
            rh_amplitude: 6.0,
            ..Self::spring()
        }
    }

    /// Constant mild weather with a fixed daylight curve and no randomness.
    pub fn mild() -> Self {
        Self {
            cloud_min: 1.0,
            t_mean: 14.0,
            t_amplitude: 0.0,
            t_day_jitter: 0.0,
            rh_amplitude: 0.0,
            rh_mean: 70.0,
            wind_sd: 0.0,
            wind_mean: 2.0,
            ..Self::spring()
        }
    }

    /// Clear-sky radiation at fractional hour `hour`, W m⁻².
    pub fn clear_sky(&self, hour: f64) -> f64 {
        let x = (hour - self.sunrise_hour) / self.day_length_hours;
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            self.peak_radiation * math::sin(PI * x)
        }
    }
}

impl Default for SyntheticProfile {
    fn default() -> Self {
        Self::spring()
    }
}

/// Deterministic synthetic weather for `days` days. Pure function of its arguments.
pub fn synthetic(seed: u64, days: usize, profile: &SyntheticProfile) -> Result<WeatherSeries> {
    if days == 0 {
        return Err(Error::InvalidWeather("synthetic weather needs at least one day".into()));
    }
    let per_day = SECONDS_PER_DAY / profile.dt;
    if !(per_day >= 1.0 && per_day == math::round(per_day)) {
        return Err(Error::InvalidWeather(format!("spacing {} s does not divide a day", profile.dt)));
    }
    let per_day = per_day as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clouds: Vec<f64> = (0..days)
        .map(|_| profile.cloud_min + (1.0 - profile.cloud_min) * rng.random::<f64>())
        .collect();
    let offsets: Vec<f64> = (0..=days)
        .map(|_| profile.t_day_jitter * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    let phi = math::exp(-profile.dt / profile.wind_tau);
    let innovation = profile.wind_sd * math::sqrt(1.0 - phi * phi);
    let mut wind = profile.wind_mean;

    let mut rows = Vec::with_capacity(days * per_day);
    for day in 0..days {
        for j in 0..per_day {
            let hour = j as f64 * profile.dt / 3600.0;
            let frac = hour / 24.0;
            let phase = math::sin(TAU * (hour - profile.t_peak_hour + 6.0) / 24.0);
            let t_out = profile.t_mean
                + offsets[day] * (1.0 - frac)
                + offsets[day + 1] * frac
                + profile.t_amplitude * phase;
            let rh_out = (profile.rh_mean - profile.rh_amplitude * phase).clamp(0.0, 100.0);
            let noise: f64 = rng.sample(StandardNormal);
            wind = (profile.wind_mean + phi * (wind - profile.wind_mean) + innovation * noise).max(0.0);
            rows.push(Disturbance {
                i_glob: clouds[day] * profile.clear_sky(hour),
                t_out,
                rh_out,
                co2_out: profile.co2,
                wind,
            });
        }
    }
    WeatherSeries::new(profile.start, profile.dt, rows)
}

/// A constant weather row repeated for `days` days.
pub fn constant(row: Disturbance, days: usize, start: i64, dt: f64) -> Result<WeatherSeries> {
    let per_day = (SECONDS_PER_DAY / dt) as usize;
    WeatherSeries::new(start, dt, alloc::vec![row; days.max(1) * per_day.max(1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: f64) -> Disturbance {
        Disturbance::from_array([i, 5.0, 80.0, 410.0, 2.0])
    }

    #[test]
    fn new_rejects_bad_rows() {
        let mut rows = alloc::vec![row(0.0); 10];
        rows[6].rh_out = 130.0;
        let err = WeatherSeries::new(0, 300.0, rows).unwrap_err();
        assert!(format!("{err}").contains("row 7"));
        assert!(WeatherSeries::new(0, 300.0, Vec::new()).is_err());
    }

    #[test]
    fn ramp_upsampled_by_hand() {
        let s = WeatherSeries::new(0, 3600.0, alloc::vec![row(0.0), row(360.0)]).unwrap();
        let r = s.resample(300.0).unwrap();
        let got: Vec<f64> = r.rows().iter().map(|d| d.i_glob).collect();
        let want: Vec<f64> = (0..=12).map(|i| 30.0 * i as f64).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn identity_and_constant_resampling() {
        let s = constant(row(100.0), 1, 0, 300.0).unwrap();
        assert_eq!(s.resample(300.0).unwrap(), s);
        let down = s.resample(3600.0).unwrap();
        assert_eq!(down.len(), 24);
        assert!(down.rows().iter().all(|d| *d == row(100.0)));
        let up = down.resample(60.0).unwrap();
        assert!(up.rows().iter().all(|d| *d == row(100.0)));
    }

    #[test]
    fn down_then_up_keeps_endpoints() {
        let s = synthetic(3, 1, &SyntheticProfile::spring()).unwrap();
        let down = s.resample(1800.0).unwrap();
        let back = down.resample(300.0).unwrap();
        assert_eq!(back.rows()[0], down.rows()[0]);
        assert_eq!(back.rows().last(), down.rows().last());
        assert_eq!(back.len(), (down.len() - 1) * 6 + 1);
    }

    #[test]
    fn incompatible_ratio_rejected() {
        let s = constant(row(1.0), 1, 0, 300.0).unwrap();
        assert!(s.resample(450.0).is_err());
    }

    #[test]
    fn synthetic_is_deterministic_and_dark_at_midnight() {
        let p = SyntheticProfile::spring();
        let a = synthetic(11, 4, &p).unwrap();
        assert_eq!(a, synthetic(11, 4, &p).unwrap());
        assert_ne!(a, synthetic(12, 4, &p).unwrap());
        for day in 0..4 {
            assert_eq!(a.row(day * 288).i_glob, 0.0);
        }
    }

    #[test]
    fn spring_daily_sums_in_range() {
        let s = synthetic(5, 30, &SyntheticProfile::spring()).unwrap();
        for day in 0..30 {
            let mj = s.daily_radiation_sum(day).unwrap();
            assert!((5.0..=20.0).contains(&mj), "day {day}: {mj}");
        }
    }

    #[test]
    fn daily_sum_of_constant_radiation() {
        let zero = constant(row(0.0), 2, 0, 300.0).unwrap();
        assert_eq!(zero.daily_radiation_sum(1).unwrap(), 0.0);
        let s = constant(row(115.74), 1, 0, 300.0).unwrap();
        assert!((s.daily_radiation_sum(0).unwrap() - 115.74 * 86_400.0 / 1e6).abs() < 1e-9);
        assert!(matches!(s.daily_radiation_sum(1), Err(Error::PartialDay { .. })));
    }

    #[test]
    fn forecast_windows() {
        let s = synthetic(1, 1, &SyntheticProfile::spring()).unwrap();
        assert!(s.forecast(10, 0).unwrap().is_empty());
        assert_eq!(s.forecast(10, 1).unwrap(), &[*s.row(11)]);
        assert_eq!(s.forecast(10, 4).unwrap().len(), 4);
        assert!(s.forecast(285, 3).is_err());
        assert!(s.forecast(284, 3).is_ok());
    }
}
