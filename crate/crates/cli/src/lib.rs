//! File formats and command implementations behind the `mintime` binary.

pub mod commands;
pub mod files;
