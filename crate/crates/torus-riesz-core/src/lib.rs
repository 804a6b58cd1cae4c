//! Numerical core for periodic Riesz energies on flat tori `R^d / Λ`.
//!
//! The crate evaluates Epstein and Epstein–Hurwitz zeta functions by Ewald
//! summation, computes expected Riesz energies of translation-invariant
//! projection determinantal processes in closed form, samples those processes
//! exactly, and provides the large-N asymptotic constants. Everything here is
//! deterministic given its inputs; randomized routines take explicit seeds.
//!
//! The crate is `no_std`-compatible (with `alloc`); IO and file formats live
//! in the companion CLI crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod dpp;
pub mod energy;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod zeta;

pub use error::Error;

/// Points closer than this (in Cartesian norm) to a lattice point are treated
/// as singular: zeta evaluators refuse them and the pair energy reports
/// coincident points.
pub const NEAR_SINGULARITY_DISTANCE: f64 = 1e-9;
