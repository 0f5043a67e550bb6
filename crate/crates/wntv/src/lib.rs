//! File formats, configuration and the experiment runner behind the `wntv`
//! command-line tool.

pub mod config;
pub mod error;
pub mod idx;
pub mod metrics;
pub mod pnm;
pub mod run;

pub use config::{Command, RunConfig};
pub use error::{Error, IdxError, PnmError, Result};
pub use run::run;
pub use wntv_core as core;
