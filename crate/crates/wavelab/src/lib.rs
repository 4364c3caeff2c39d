//! Experiment runner for the half-plane elastic wave laboratory.
//!
//! Thin orchestration over the `halfplane` crate: configuration layering
//! (CLI over file over defaults), CSV emission with lossless float
//! formatting, and the standard studies (surface-mode table, convergence,
//! resolution scaling, mode conversion, boundary sweeps, resolution
//! prediction). The binary in `main.rs` wires these to subcommands.

pub mod config;
pub mod output;
pub mod studies;
