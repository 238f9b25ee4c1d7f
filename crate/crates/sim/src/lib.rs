//! Std companion to `mmwave-core`: TOML configuration, tabulated pattern
//! files, a threaded drop runner, result emission and the `mmwave-sim`
//! command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod pattern_csv;
pub mod report;
pub mod runner;
