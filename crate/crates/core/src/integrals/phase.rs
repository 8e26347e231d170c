use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_ASYMPTOTIC_THRESHOLD: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMode {
    Exact,
    Asymptotic,
    /// Asymptotic when |Ω|τ exceeds the threshold, exact otherwise.
    Auto(f64),
}

/// Faddeeva function w(z) = exp(−z²) erfc(−iz).
pub fn faddeeva(z: C64) -> C64 {
    errorfunctions::w_with_relerror(z, f64::EPSILON)
}

/// ∫ e^{iΩt} e^{−σt²/τ²} dt over the real line.
pub fn gaussian_phase_integral(omega: f64, tau: f64, sigma: u32) -> C64 {
    let s = sigma as f64;
    C64::new(tau * (PI / s).sqrt() * (-omega * omega * tau * tau / (4.0 * s)).exp(), 0.0)
}

/// e^{−iΩt} ∫_{−∞}^{t} e^{iΩs − a s²} ds with a = σ/τ², evaluated without the
/// fast carrier so that it stays smooth in t.
pub fn phase_integral_envelope(omega: f64, a: f64, t: f64) -> C64 {
    let sa = a.sqrt();
    let pre = PI.sqrt() / (2.0 * sa) * (-a * t * t).exp();
    if t <= 0.0 {
        faddeeva(C64::new(-omega / (2.0 * sa), -sa * t)) * pre
    } else {
        let full = (PI / a).sqrt() * (-omega * omega / (4.0 * a)).exp();
        C64::from_polar(full, -omega * t) - faddeeva(C64::new(omega / (2.0 * sa), sa * t)) * pre
    }
}

/// ∫_{−∞}^{t} e^{iΩs} e^{−σs²/τ²} ds.
pub fn incomplete_phase_integral(omega: f64, tau: f64, sigma: u32, t_upper: f64, mode: PhaseMode) -> Result<C64> {
    let a = sigma as f64 / (tau * tau);
    let asymptotic = match mode {
        PhaseMode::Exact => false,
        PhaseMode::Asymptotic => true,
        PhaseMode::Auto(th) => omega.abs() * tau > th,
    };
    if asymptotic {
        if omega == 0.0 {
            return Err(Error::AsymptoticInvalid);
        }
        return Ok(C64::new(0.0, -1.0 / omega) * C64::from_polar((-a * t_upper * t_upper).exp(), omega * t_upper));
    }
    if t_upper == f64::INFINITY {
        return Ok(gaussian_phase_integral(omega, tau, sigma));
    }
    if t_upper == f64::NEG_INFINITY {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(phase_integral_envelope(omega, a, t_upper) * C64::from_polar(1.0, omega * t_upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{integrate, QuadOptions};

    fn brute(omega: f64, tau: f64, sigma: u32, t: f64) -> C64 {
        let a = sigma as f64 / (tau * tau);
        let lo = -10.0 * tau;
        let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 1e-15 * tau, max_intervals: 20_000 };
        integrate(|s| C64::from_polar((-a * s * s).exp(), omega * s), lo, t, &[0.0], opts).unwrap().value
    }

    #[test]
    fn faddeeva_known_values() {
        // w(0) = 1, w(i) = erfcx(1)
        assert!((faddeeva(C64::new(0.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!((faddeeva(C64::new(0.0, 1.0)).re - 0.427_583_576_155_807).abs() < 1e-14);
    }

    #[test]
    fn incomplete_matches_quadrature() {
        for &(om, tau, sigma, t) in &[
            (0.0, 1.0, 1, 0.3),
            (3.0, 1.0, 1, -0.7),
            (3.0, 1.0, 2, 1.2),
            (-7.5, 2.0, 1, 0.4),
            (40.0, 1.0, 2, -0.1),
            (40.0, 1.0, 2, 2.5),
        ] {
            let exact = incomplete_phase_integral(om, tau, sigma, t, PhaseMode::Exact).unwrap();
            let q = brute(om, tau, sigma, t);
            assert!((exact - q).norm() < 1e-11 * q.norm().max(1e-3), "{om} {t}: {exact} vs {q}");
        }
    }

    #[test]
    fn infinite_limits() {
        let full = incomplete_phase_integral(2.0, 1.5, 2, f64::INFINITY, PhaseMode::Exact).unwrap();
        let late = incomplete_phase_integral(2.0, 1.5, 2, 40.0, PhaseMode::Exact).unwrap();
        assert!((full - late).norm() < 1e-14);
        let early = incomplete_phase_integral(2.0, 1.5, 2, -40.0, PhaseMode::Exact).unwrap();
        assert!(early.norm() < 1e-300);
    }

    #[test]
    fn asymptotic_zero_frequency_is_error() {
        assert!(matches!(
            incomplete_phase_integral(0.0, 1.0, 1, 0.0, PhaseMode::Asymptotic),
            Err(Error::AsymptoticInvalid)
        ));
        assert!(incomplete_phase_integral(0.0, 1.0, 1, 0.0, PhaseMode::Auto(50.0)).is_ok());
    }
}
