//! Pseudo-spectral simulation and dyadic analysis of incompressible Hall-MHD
//! with fractional magnetic diffusion on the periodic box `[0, 2π)³`.
//!
//! The crate provides:
//!
//! - exact spectral calculus on a Fourier lattice with 2/3-rule dealiasing
//!   ([`operators`]),
//! - a Littlewood-Paley dyadic decomposition with paraproduct splittings,
//!   frequency-localized commutators, and empirical-constant probes
//!   ([`littlewood_paley`]),
//! - an integrating-factor RK4 time integrator for the coupled system, with
//!   the purely resistive/viscous multipliers handled exactly ([`solver`]),
//! - shell-resolved energy budgets, cancellation checks, and a Riccati-type
//!   existence-horizon estimator ([`diagnostics`], [`riccati`]),
//! - a vanishing-Hall convergence study harness with log-log rate fitting
//!   ([`sweep`]), and
//! - file formats and report writers used by the `hallmhd` CLI ([`config`],
//!   [`snapshot`], [`report`]).

pub mod config;
pub mod diagnostics;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod littlewood_paley;
pub mod operators;
pub mod probes;
pub mod report;
pub mod riccati;
pub mod snapshot;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{PhysicalField, PhysicalScalar, SpectralField, SpectralScalar};
pub use grid::Grid;
