//! Spin-dependent Kapitza-Dirac scattering of electrons in counter-propagating
//! ω / 2ω laser fields, computed three ways: time-dependent perturbation theory,
//! a Pauli-equation momentum-ladder solver, and a relativistic classical tracer.

pub mod classical;
pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod fields;
pub mod integrals;
pub mod pauli;
pub mod perturbation;
pub mod pulse;
pub mod scaling;

pub use constants::Constants;
pub use error::{Error, Result};
pub use pulse::{derived_quantities, Derived, Direction, ElectronSpec, LaserPulseSpec, Polarization, Spin};
pub use scaling::{scaling_probability, ScalingLaw};

pub type C64 = num_complex::Complex64;
