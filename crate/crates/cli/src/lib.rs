//! Command-line front end: argument parsing, the field file format, run
//! manifests and the subcommand implementations.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod manifest;
