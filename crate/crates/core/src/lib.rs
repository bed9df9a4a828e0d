//! Numerical simulation of 1D Klein tunneling.
//!
//! Two independent engines evolve the same relativistic scattering problem:
//!
//! * [`dirac`] solves the one-dimensional Dirac equation on a spatial grid with a
//!   split-operator propagator.
//! * [`ion`] emulates the two-ion analogue: one qubit per ion plus a shared
//!   motional mode in a truncated Fock space, driven by bichromatic couplings.
//!
//! [`analytic`] holds the Landau-Zener prediction and the laboratory-to-Dirac
//! parameter map, [`reconstruction`] emulates the fringe-based density
//! measurement, [`scenarios`] ties everything together into reproducible runs
//! and [`oracle`] contains slow brute-force references used by the tests.
//!
//! Units throughout: length in Δ (motional ground-state width), momentum in ħ/Δ,
//! time in μs, energies as angular frequencies in rad/μs (ħ = 1).

pub mod analytic;
pub mod dirac;
pub mod error;
pub mod grid;
pub mod ion;
pub mod oracle;
pub mod reconstruction;
pub mod scenarios;
pub mod units;

pub use error::{Error, Result};
pub use grid::Grid;

pub type C64 = num_complex::Complex64;
