//! Weather CSV files.
//!
//! Header `time,iglob,tout,rhout,co2out,wind` (any column order), one row per
//! sample, RFC 3339 UTC timestamps at uniform spacing:
//!
//! ```text
//! time,iglob,tout,rhout,co2out,wind
//! 2010-03-01T00:00:00Z,0,4.2,88,410,3.1
//! 2010-03-01T00:05:00Z,0,4.1,88.5,410,3.3
//! ```
//!
//! Values are written with Rust's shortest round-trip formatting, so a
//! written series reads back bit-identical.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use glasshouse_core::{Disturbance, WeatherSeries};

use crate::error::{Error, Result};

pub const HEADER: [&str; 6] = ["time", "iglob", "tout", "rhout", "co2out", "wind"];

/// One problem found in a weather file. `row` is 1-based over data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub row: Option<usize>,
    pub line: Option<u64>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.row, self.line) {
            (Some(r), Some(l)) => write!(f, "row {r} (line {l}): {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

struct Scan {
    times: Vec<i64>,
    rows: Vec<Disturbance>,
    violations: Vec<Violation>,
}

fn file_violation(message: String) -> Violation {
    Violation {
        row: None,
        line: None,
        message,
    }
}

fn parse_time(s: &str) -> std::result::Result<i64, String> {
    let t = DateTime::parse_from_rfc3339(s).map_err(|e| format!("bad timestamp `{s}`: {e}"))?;
    if t.offset().local_minus_utc() != 0 {
        return Err(format!("timestamp `{s}` is not UTC"));
    }
    if t.timestamp_subsec_nanos() != 0 {
        return Err(format!("timestamp `{s}` has fractional seconds"));
    }
    Ok(t.timestamp())
}

/// Reads every row, collecting problems instead of stopping at the first.
/// With `stop_early`, returns after the first violation.
fn scan<R: Read>(reader: R, stop_early: bool) -> Scan {
    let mut out = Scan {
        times: Vec::new(),
        rows: Vec::new(),
        violations: Vec::new(),
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            out.violations.push(file_violation(format!("unreadable header: {e}")));
            return out;
        }
    };
    let mut cols = [0usize; 6];
    for (c, name) in cols.iter_mut().zip(HEADER) {
        match header.iter().position(|h| h == name) {
            Some(i) => *c = i,
            None => out.violations.push(file_violation(format!("missing column `{name}`"))),
        }
    }
    if !out.violations.is_empty() {
        return out;
    }

    let mut dt: Option<i64> = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let line = row as u64 + 1;
        let fail = |message: String| Violation {
            row: Some(row),
            line: Some(line),
            message,
        };
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                out.violations.push(fail(e.to_string()));
                if stop_early {
                    return out;
                }
                continue;
            }
        };
        let line = rec.position().map_or(line, |p| p.line());
        let fail = |message: String| Violation {
            row: Some(row),
            line: Some(line),
            message,
        };
        let before = out.violations.len();
        let time = match parse_time(rec.get(cols[0]).unwrap_or("")) {
            Ok(t) => Some(t),
            Err(m) => {
                out.violations.push(fail(m));
                None
            }
        };
        let mut v = [0.0; 5];
        for (k, name) in HEADER[1..].iter().enumerate() {
            let raw = rec.get(cols[k + 1]).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(x) => v[k] = x,
                Err(_) => out.violations.push(fail(format!("`{name}` is not a number: `{raw}`"))),
            }
        }
        if out.violations.len() == before {
            let d = Disturbance::from_array(v);
            if let Err(e) = d.validate() {
                out.violations.push(fail(e.to_string()));
            } else if let Some(t) = time {
                if let Some(&prev) = out.times.last() {
                    let step = t - prev;
                    match dt {
                        None if step > 0 => dt = Some(step),
                        None => out.violations.push(fail(format!("timestamps must increase, got step {step} s"))),
                        Some(expected) if step != expected => out.violations.push(fail(format!(
                            "non-uniform spacing: {step} s after the previous row, expected {expected} s"
                        ))),
                        Some(_) => {}
                    }
                }
                out.times.push(t);
                out.rows.push(d);
            }
        }
        if stop_early && !out.violations.is_empty() {
            return out;
        }
    }
    if out.violations.is_empty() && out.rows.len() < 2 {
        out.violations.push(file_violation(format!(
            "need at least 2 rows to determine the spacing, found {}",
            out.rows.len()
        )));
    }
    out
}

/// Parses a weather CSV. `source_name` labels errors.
pub fn read_csv<R: Read>(reader: R, source_name: &str) -> Result<WeatherSeries> {
    let s = scan(reader, true);
    if let Some(v) = s.violations.into_iter().next() {
        return Err(match (v.row, v.line) {
            (Some(row), Some(line)) => Error::WeatherRow {
                source_name: source_name.to_string(),
                row,
                line,
                message: v.message,
            },
            _ => Error::WeatherFile {
                source_name: source_name.to_string(),
                message: v.message,
            },
        });
    }
    let dt = (s.times[1] - s.times[0]) as f64;
    Ok(WeatherSeries::new(s.times[0], dt, s.rows)?)
}

pub fn load_csv(path: &Path) -> Result<WeatherSeries> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(f, &path.display().to_string())
}

/// Every problem in the file; empty when it loads cleanly.
pub fn validate_csv(path: &Path) -> Result<Vec<Violation>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(scan(f, false).violations)
}

pub fn write_csv<W: Write>(writer: W, series: &WeatherSeries) -> Result<()> {
    if series.dt().fract() != 0.0 {
        return Err(Error::Invalid(format!(
            "spacing {} s is not a whole number of seconds",
            series.dt()
        )));
    }
    let dt = series.dt() as i64;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for (k, row) in series.rows().iter().enumerate() {
        let t = series.start() + k as i64 * dt;
        let stamp = DateTime::<Utc>::from_timestamp(t, 0)
            .ok_or_else(|| Error::Invalid(format!("timestamp {t} out of range")))?
            .to_rfc3339_opts(SecondsFormat::Secs, true);
        let mut rec = vec![stamp];
        rec.extend(row.to_array().iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<weather csv>", e))?;
    Ok(())
}

pub fn save_csv(path: &Path, series: &WeatherSeries) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(f), series)
}
