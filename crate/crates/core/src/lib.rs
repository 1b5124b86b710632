//! ecd-lab: a numerical laboratory for energy-conserving descent (ECD) on
//! one-dimensional positive double wells.
//!
//! The lab cross-validates three routes to the same physics:
//!
//! * [`secd::sim`] — exact event-driven simulation of the stochastic ECD
//!   telegraph dynamics, plus a raw Runge–Kutta integrator of the underlying
//!   ODEs for cross-checks;
//! * [`secd::analytic`] — every closed-form hitting-time quantity (crossing
//!   probability, embedded-chain legs, boundary-value running costs, the full
//!   expected hitting time and its symmetric specialization);
//! * [`qecd`] — the quantized dynamics: Liouville-transformed spectral model,
//!   wavepacket evolution, the randomized-time detection protocol, and the
//!   semiclassical (WKB / stationary-phase) approximations it is checked
//!   against.
//!
//! [`case_study`] ties the regimes together and reproduces the headline
//! classical-vs-quantum comparisons on the symmetric quartic well.

// `!(x > 0.0)` style comparisons are deliberate: they reject NaN along with
// the out-of-range sign, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod case_study;
pub mod cli;
pub mod error;
pub mod interp;
pub mod potential;
pub mod qecd;
pub mod quad;
pub mod secd;
pub mod special;
pub mod stats;

pub use error::{LabError, Result};
pub use potential::{build_maps, CoordinateMaps, Landscape, ValidationReport};
