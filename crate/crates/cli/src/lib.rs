//! Command-line front end for `dkit-core`: TOML run configurations in,
//! fixed-precision JSON reports and CSV sequences out.

pub mod commands;
pub mod config;
pub mod report;
