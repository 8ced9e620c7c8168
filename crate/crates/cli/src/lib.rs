//! Scenario harness for `bohr-core`: TOML scenarios, pipelines behind the
//! `bohr` subcommands, and deterministic CSV / gnuplot output.

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod pipeline;
pub mod run;

pub use config::Scenario;
