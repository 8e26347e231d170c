use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{C, EPS0, HBAR, M, MU_B, Q};

/// First-order amplitude magnitude ‖H‖τ/ħ.
pub fn estimate_first_order(h_norm: f64, tau: f64) -> f64 {
    h_norm * tau / HBAR
}

/// Second-order amplitude magnitude ‖H¹‖‖H²‖τ/(ωħ²) · ħk/(mc).
pub fn estimate_second_order(h1_norm: f64, h2_norm: f64, omega: f64, tau: f64, k: f64) -> f64 {
    h1_norm * h2_norm * tau / (omega * HBAR * HBAR) * (HBAR * k / (M * C))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpuriousReport {
    /// First-order over second-order amplitude (spin vertex ‖H‖ = μB·B0).
    pub first_to_second_order: f64,
    /// Intensity isolation needed to push a first-order process below the spin-flip signal.
    pub intensity_isolation: f64,
    /// Two-color KD over SKD vertex ratio, (q/m)p·A / (μB·B), at the given misalignment.
    pub two_color_to_skd: f64,
    /// Same ratio with the full projection of p on the polarization.
    pub two_color_to_skd_unsuppressed: f64,
    /// Misalignment below which the two-color KD vertex drops under the spin vertex.
    pub critical_misalignment: f64,
}

/// `theta` is the deviation of the polarization from perpendicular to the electron velocity.
pub fn spurious_ratios(intensity: f64, v: f64, lambda: f64, theta: f64) -> SpuriousReport {
    let w = 2.0 * PI * C / lambda;
    let k = w / C;
    let a0 = (2.0 * intensity / (C * EPS0)).sqrt() / w;
    let b0 = k * a0;
    let spin = MU_B * b0;
    let h1 = Q * Q * a0 * a0 / (2.0 * M);
    let ratio = estimate_first_order(h1, 1.0) / estimate_second_order(h1, spin, w, 1.0, k);
    let full = Q * v * a0 / spin;
    SpuriousReport {
        first_to_second_order: ratio,
        intensity_isolation: 1.0 / ratio,
        two_color_to_skd: full * theta.sin().abs(),
        two_color_to_skd_unsuppressed: full,
        critical_misalignment: if full > 1.0 { (1.0 / full).asin() } else { PI / 2.0 },
    }
}

/// Classical photon-emission probability of an electron quivering in the field:
/// peak acceleration qE0/m, cycle-averaged Larmor power, divided by ħω.
pub fn larmor_probability(intensity: f64, lambda: f64, tau: f64) -> f64 {
    let w = 2.0 * PI * C / lambda;
    let e0 = (2.0 * intensity / (C * EPS0)).sqrt();
    let acc = Q * e0 / M;
    let power = 0.5 * Q * Q * acc * acc / (6.0 * PI * EPS0 * C.powi(3));
    power * tau / (HBAR * w)
}

/// Peak acceleration qE0/m (m/s²).
pub fn peak_acceleration(intensity: f64) -> f64 {
    Q * (2.0 * intensity / (C * EPS0)).sqrt() / M
}
