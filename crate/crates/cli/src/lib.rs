//! Configuration, sweeps and table output behind the `casimir` binary.

pub mod config;
pub mod dos;
pub mod sweep;
pub mod table;

pub use config::{parse_config, ConfigError, Format, PathChoice, RunConfig};
pub use sweep::run_sweep;
pub use table::{write_table, Row, Status, Table};
