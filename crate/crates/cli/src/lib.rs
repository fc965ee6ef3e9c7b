//! Driver library for the `rclab` binary: resolved run configuration,
//! report documents and rendering, CSV artifacts, and command execution.
//! The binary adds only argument parsing and exit-code mapping on top.

pub mod artifact;
pub mod config;
pub mod report;
pub mod run;
