//! Configuration, dispatch and output for the `gravlab` command-line tool.

pub mod config;
pub mod error;
pub mod run;
pub mod table;

pub use config::{load_config, parse_config, save_config, Scenario, ScenarioConfig};
pub use error::{CliError, Result};
pub use run::run;
pub use table::{Format, ResultTable, Value};
