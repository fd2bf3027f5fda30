//! UTC simulation clock.
//!
//! Timestamps are seconds since the Unix epoch; calendar fields are derived
//! with the proleptic Gregorian day-count algorithm, so no time-zone or DST
//! handling is involved.

const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    start: i64,
    dt: f64,
    step: usize,
}

impl SimClock {
    /// Clock at step 0, starting at `start` (Unix seconds, UTC) with step size `dt` seconds.
    pub fn new(start: i64, dt: f64) -> Self {
        Self { start, dt, step: 0 }
    }

    pub fn at_step(mut self, step: usize) -> Self {
        self.step = step;
        self
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn advance(&mut self) {
        self.step += 1;
    }

    /// Current time in Unix seconds (fractional if `dt` is not integral).
    pub fn timestamp(&self) -> f64 {
        self.start as f64 + self.step as f64 * self.dt
    }

    /// Seconds elapsed since the clock start.
    pub fn elapsed(&self) -> f64 {
        self.step as f64 * self.dt
    }

    fn split(&self) -> (i64, f64) {
        let t = self.timestamp();
        let days = crate::math::floor(t / SECONDS_PER_DAY as f64);
        (days as i64, t - days * SECONDS_PER_DAY as f64)
    }

    /// Fractional hour of the UTC day in `[0, 24)`.
    pub fn hour_of_day(&self) -> f64 {
        self.split().1 / 3600.0
    }

    /// Day of the year, 1-based.
    pub fn day_of_year(&self) -> u32 {
        let (days, _) = self.split();
        let (y, _, _) = civil_from_days(days);
        (days - days_from_civil(y, 1, 1) + 1) as u32
    }

    /// `(year, month, day)` of the current UTC date.
    pub fn date(&self) -> (i64, u32, u32) {
        civil_from_days(self.split().0)
    }
}

/// Days since 1970-01-01 for a Gregorian date.
pub fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let m = i64::from(m);
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + i64::from(d) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Inverse of [`days_from_civil`].
pub fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

/// Unix seconds for a UTC date at midnight.
pub fn unix_midnight(y: i64, m: u32, d: u32) -> i64 {
    days_from_civil(y, m, d) * SECONDS_PER_DAY
}
