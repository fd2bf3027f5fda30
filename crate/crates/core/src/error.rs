use alloc::string::String;

/// Errors raised by the model, the environment and the controllers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value {value} in `{field}`")]
    NonFinite { field: &'static str, value: f64 },

    #[error("integration produced non-finite `{field}` at sub-step {substep}")]
    Diverged { field: &'static str, substep: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("weather series too short: episode needs {required} rows, series has {available}")]
    WeatherTooShort { required: usize, available: usize },

    #[error("invalid weather series: {0}")]
    InvalidWeather(String),

    #[error("day {day} is not fully covered by the series ({available} of {required} rows)")]
    PartialDay {
        day: usize,
        required: usize,
        available: usize,
    },

    #[error("forecast window [{start}, {end}) exceeds series length {len}")]
    ForecastOutOfRange { start: usize, end: usize, len: usize },

    #[error("environment must be reset before stepping")]
    NotReset,

    #[error("episode already truncated after {steps} steps; call reset")]
    EpisodeDone { steps: usize },

    #[error("episode incomplete: {actual} of {expected} steps recorded")]
    IncompleteEpisode { expected: usize, actual: usize },

    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
}

pub type Result<T> = core::result::Result<T, Error>;
