//! Command-line harness for the litigation models in `lexsim-core`: JSON
//! configs, CSV tables, SVG charts and parameter sweeps.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod run;
pub mod svg;
pub mod sweep;

pub use config::{load_config, Model, RunConfig};
pub use error::{HarnessError, Result, Violation};
