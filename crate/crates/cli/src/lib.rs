//! Stage drivers behind the `paramine` binary.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod fixture;
pub mod stages;

pub use config::Config;
pub use error::CliError;
pub use stages::{run, Stage};
