//! riscade — a geometry-consistent Monte-Carlo simulator for RIS-assisted
//! MIMO downlinks.
//!
//! The simulator generates the three constituent channels of a
//! BS / RIS / UE triangle (direct, BS→RIS, RIS→UE) with either a simplified
//! 3GPP-style geometry-based stochastic model or a Rician baseline, composes
//! them through the RIS phase-control matrix, jointly optimizes BS precoding
//! and RIS phases, and aggregates Monte-Carlo CDFs of channel eigenvalues and
//! achievable rate.
//!
//! Modules:
//! * [`geometry`] — array layouts, local frames, steering vectors, patterns.
//! * [`gbsm`] — cluster-based stochastic channel generator (UMa LoS/NLoS).
//! * [`rician`] — Rician baseline channel and eigenvalue extraction.
//! * [`cascade`] — RIS control, channel composition, scattering pattern and
//!   the radar-equation link budget.
//! * [`precoding`] — achievable rate, water-filling, BS/RIS optimization.
//! * [`campaign`] — Monte-Carlo harness, config parsing, CSV/JSON outputs.

// Validation guards are written `!(x > 0.0)` on purpose: the negated form
// also rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod cascade;
pub mod channel;
pub mod db;
pub mod error;
pub mod gbsm;
pub mod geometry;
pub mod precoding;
pub mod rician;
pub mod rng;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod oracles;
