//! Antenna array radiation patterns, the 28 GHz cluster/subpath channel, and
//! Monte Carlo downlink SINR/INR evaluation for sectorized mmWave cells.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs plus an explicit random stream, so the companion
//! `mmwave-sim` crate can fan drops out over threads and still reproduce
//! results bit for bit.
//!
//! Module map:
//!
//! - [`antenna`]: element gains, beam weights, array factor, field amplitude.
//! - [`channel`]: cluster/subpath sampling, three-state path loss, channel
//!   matrix and aligned gain.
//! - [`network`]: deployments, sectors, association, SINR and INR.
//! - [`sim`]: scenarios, per-drop evaluation, ECDFs and sweeps.
//! - [`rng`]: counter-keyed substreams.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod antenna;
pub mod channel;
pub mod error;
mod math;
pub mod network;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use num_complex::Complex64;
