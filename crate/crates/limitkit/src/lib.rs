//! File formats, run configuration, and the command-line front end for the
//! limit-setting toolkit. The physics and statistics live in
//! [`limitkit_core`]; this crate adds everything that touches the filesystem:
//! CSV spectra, TOML configs, JSON reports, and exit-code plumbing.

#![deny(unsafe_code)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;
