//! Oscillatory Gaussian integrals and adaptive quadrature.

mod phase;
mod quadrature;

pub use phase::{
    faddeeva, gaussian_phase_integral, incomplete_phase_integral, phase_integral_envelope, PhaseMode,
    DEFAULT_ASYMPTOTIC_THRESHOLD,
};
pub use quadrature::{integrate, integrate_real, QuadOptions, QuadResult};
