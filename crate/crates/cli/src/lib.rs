//! File formats, parallel drivers and the `glasshouse` command line on top of
//! [`glasshouse_core`].
//!
//! Library users who only need to construct environments from YAML documents
//! (for example a foreign-language wrapper) can use [`config::env_from_yaml`]
//! and [`trajectory::info_json`].

pub mod config;
pub mod controllers;
pub mod error;
pub mod policy_io;
pub mod speed;
pub mod sweep;
pub mod train;
pub mod trajectory;
pub mod weather_csv;

pub use config::{env_from_yaml, EnvDocument};
pub use error::{Error, Result};
