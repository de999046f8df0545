//! Pseudospectral solver for the incompressible Navier-Stokes equations on a
//! periodic box, with a data-assimilation layer supporting windowed nudging
//! (an assimilation window `tau` inside each observation interval `kappa`),
//! classical always-on nudging (`tau = kappa`), and direct low-mode
//! replacement. Includes a twin-experiment harness, convergence-condition
//! checking for the nudged system, and a small CLI.
//!
//! The crate is organised around a few layers:
//!
//! * [`grid`] / [`field`] — Fourier representation of divergence-free,
//!   zero-mean vector fields and the core spectral operators.
//! * [`dynamics`] — right-hand-side assembly, Taylor-Green forcing, RK4
//!   stepping, CFL time-step selection.
//! * [`assim`] — interpolant operators, observation capture, the nudging
//!   feedback term, and direct modal replacement.
//! * [`theory`] — parameter-condition checks and decay-factor formulas for
//!   the nudged system, emitted as a machine-readable report.
//! * [`experiment`] — identical-twin runs, error tracking, parameter sweeps.
//! * [`config`] / [`snapshot`] / [`csvio`] / [`cli`] — file formats and the
//!   command-line surface.

pub mod assim;
pub mod cli;
pub mod config;
pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod experiment;
mod fft;
pub mod field;
pub mod grid;
pub mod snapshot;
pub mod theory;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::Grid;
