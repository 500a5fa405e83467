//! Thermal quantum correlations of the mixed spin-(1/2,1) Heisenberg dimer.
//!
//! The library builds the dimer Hamiltonian in the qubit-qutrit product
//! basis, its closed-form spectrum and Gibbs states, and evaluates
//! measurement-induced nonlocality (Hilbert-Schmidt and fidelity-based) and
//! negativity on them, with parameter sweeps, threshold bisection and
//! figure presets on top. The `cli` module is the command-line surface.

pub mod cli;
pub mod config;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod model;
pub mod random;
pub mod selftest;
pub mod sweep;
pub mod thermal;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, EigenSystem};
pub use measures::{GridSpec, MeasureReport};
pub use model::{AnalyticSpectrum, DimerParams, UnitSystem};
pub use sweep::{SweepSpec, ThresholdQuery};
pub use thermal::ThermalState;
