//! Config-driven runs, parameter sweeps and figure presets.
//!
//! A run reads a TOML config, dispatches it to one of the propagators of
//! `xyz-dynamics` and writes a CSV trace whose `#` header echoes the
//! config. Sweeps repeat a run over a list of values of one parameter and
//! add a summary of the concurrence oscillation per value.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::{ConfigError, Document};
pub use run::{AdmissibilityError, CliError, Overrides, Trace};
pub use sweep::{SummaryRow, SweepResult};
