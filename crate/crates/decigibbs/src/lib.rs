//! File formats, configuration, manifests and the `decigibbs` command line
//! on top of `decigibbs-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod field_io;
pub mod output;

pub use cli::run;
