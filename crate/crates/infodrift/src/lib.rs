//! # infodrift
//!
//! A numerical laboratory for markets with asymmetric information. An
//! insider's knowledge is modeled by enlarging the public filtration; the
//! price then acquires an extra drift (the *information drift* `μ`) under the
//! insider's point of view, and the insider's additional logarithmic utility
//! equals the drift energy `½ E ∫ μ² dt`. That same number is an entropy: the
//! Shannon information carried by the insider's signal.
//!
//! The crate provides three independent computational routes to this quantity
//! and the machinery to check that they agree at desk scale:
//!
//! * **Wealth route** — simulate log-optimal trading with and without the
//!   signal and average the paired difference of terminal log wealth
//!   ([`montecarlo::utility_increment_by_wealth`]).
//! * **Drift route** — integrate `½ μ²` along simulated paths for the
//!   closed-form drifts in [`drift`] ([`montecarlo::drift_energy`]).
//! * **Information route** — evaluate the matching entropy or mutual
//!   information directly ([`information`]), or the partition measure of the
//!   dynamic-noise model ([`partition`]).
//!
//! [`montecarlo::verify_identity`] ties the routes together for a registry of
//! named cases, and [`verify`] runs the whole suite the way the `infodrift`
//! binary does.
//!
//! Every estimator is deterministic: paths are derived from
//! `(master_seed, path_index)` counter-style substreams and reductions use a
//! fixed pairwise order, so results are bit-identical for any worker count.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod config;
pub mod drift;
pub mod error;
pub mod grid;
pub mod information;
pub mod linalg;
pub mod market;
pub mod montecarlo;
pub mod numerics;
pub mod partition;
pub mod quadrature;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
