//! Heat-budget engine for dilution-refrigerator coaxial wiring.
//!
//! Models the static (conduction) and active (Ohmic, attenuator, amplifier)
//! heat loads of semi-rigid coax signal lines across fridge stages, and
//! predicts whether a wiring configuration for a given superconducting
//! processor size fits within the per-stage cooling budgets.
//!
//! The pieces, bottom up:
//!
//! - [`materials`]: log10-polynomial property models k(T) and rho(T) with
//!   out-of-range extensions, plus the built-in SC-086/50-SCN-CN fits.
//! - [`fitting`]: regenerate such models from (T, value) measurements by
//!   least squares in log-log space.
//! - [`cables`]: per-segment and per-stage static conduction loads.
//! - [`attenuators`]: T-pad synthesis, DC current back-propagation, Ohmic
//!   and attenuator dissipation, TWPA pump power flow.
//! - [`system`]: fridge and processor models, per-stage budgets, size sweeps
//!   (rayon-parallel with the default `parallel` feature).
//! - [`config`] / [`report`]: the TOML run configuration and CSV/table
//!   emission used by the CLI.

// `!(x > 0.0)` style checks are kept: unlike `x <= 0.0` they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attenuators;
pub mod cables;
pub mod config;
pub mod error;
pub mod fitting;
pub mod materials;
pub mod quad;
pub mod report;
pub mod system;

pub use error::{Error, Result};
