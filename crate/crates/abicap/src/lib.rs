//! IO, configuration, and reporting companion to the core simulation
//! engine: TOML config files, CSV/SVG emitters, and the command-line
//! front end.

pub mod cli;
pub mod config;
pub mod report;
