//! File formats and the command-line front end for `pirarray`.

pub mod cli;
pub mod formats;
