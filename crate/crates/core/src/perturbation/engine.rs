use std::f64::consts::PI;

use super::{OperatorKind, SpinAction, Vertex};
use crate::constants::{HBAR, M, MU_B, Q};
use crate::error::{Error, Result};
use crate::fields::{fourier_terms, Component, TwoColorField};
use crate::integrals::{gaussian_phase_integral, integrate, phase_integral_envelope, QuadOptions};
use crate::pulse::Spin;
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct PtOptions {
    /// Relative tolerance of the outer time quadrature.
    pub rel_tol: f64,
    /// Outer integration window, in units of τ on each side.
    pub window: f64,
    /// Vertex pairs with |Ω₁ + Ω₂|·τ above this are energy-forbidden and skipped.
    pub detuning_cutoff: f64,
    /// Error out when the quadrature's own error estimate exceeds this relative level.
    pub max_rel_err: f64,
    /// Longitudinal momentum offset (1/m) added to every ladder rung.
    pub k_z0: f64,
}

impl Default for PtOptions {
    fn default() -> Self {
        PtOptions { rel_tol: 1e-10, window: 6.0, detuning_cutoff: 40.0, max_rel_err: 1e-6, k_z0: 0.0 }
    }
}

/// ħ(k_z0 + n k)²/2m; the common transverse part is dropped.
pub fn kinetic_frequency(k: f64, k_z0: f64, n: i32) -> f64 {
    let kz = k_z0 + n as f64 * k;
    HBAR * kz * kz / (2.0 * M)
}

/// Interaction vertices of H' = −(q/m)A_x p_x + (q²/2m)A² − μB(B_xσ_x + B_yσ_y).
/// Spin-independent pieces with no momentum transfer only shift the global phase
/// and are left out.
pub fn vertices(field: &TwoColorField, px: f64) -> Vec<Vertex> {
    let mut out = Vec::new();
    if px != 0.0 {
        for t in fourier_terms(field, Component::Ax) {
            out.push(Vertex {
                operator_kind: OperatorKind::PDotA,
                delta_n: t.delta_n,
                omega_multiple: t.omega_multiple,
                spin_action: SpinAction::None,
                amplitude_prefactor: -t.amplitude_x * (Q / M * px),
                envelope_power: 1,
            });
        }
    }
    for t in fourier_terms(field, Component::ASq) {
        if t.delta_n == 0 {
            continue;
        }
        out.push(Vertex {
            operator_kind: OperatorKind::ASquared,
            delta_n: t.delta_n,
            omega_multiple: t.omega_multiple,
            spin_action: SpinAction::None,
            amplitude_prefactor: t.value() * (Q * Q / (2.0 * M)),
            envelope_power: 2,
        });
    }
    // σ_x = σ₊ + σ₋, σ_y = −iσ₊ + iσ₋
    let bx = fourier_terms(field, Component::Bx);
    let by = fourier_terms(field, Component::By);
    let mut keys: Vec<(i32, i32)> = bx.iter().chain(by.iter()).map(|t| (t.delta_n, t.omega_multiple)).collect();
    keys.sort();
    keys.dedup();
    let i = C64::new(0.0, 1.0);
    for (d, m) in keys {
        let find = |l: &[crate::fields::FourierTerm]| {
            l.iter().find(|t| t.delta_n == d && t.omega_multiple == m).map(|t| t.value()).unwrap_or_default()
        };
        let (x, y) = (find(&bx), find(&by));
        for (action, c) in [(SpinAction::Raise, x - i * y), (SpinAction::Lower, x + i * y)] {
            if c.norm() > 1e-14 * (x.norm() + y.norm()) {
                out.push(Vertex {
                    operator_kind: OperatorKind::MuDotB,
                    delta_n: d,
                    omega_multiple: m,
                    spin_action: action,
                    amplitude_prefactor: -c * MU_B,
                    envelope_power: 1,
                });
            }
        }
    }
    out
}

/// −(i/ħ) P ∫ g^p e^{iΩt} dt with Ω the full exponent frequency.
pub fn first_order_amplitude(v: &Vertex, omega_full: f64, tau: f64) -> C64 {
    C64::new(0.0, -1.0 / HBAR) * v.amplitude_prefactor * gaussian_phase_integral(omega_full, tau, v.envelope_power)
}

struct Pair {
    coef: C64,
    om1: f64,
    a1: f64,
    om_tot: f64,
    sigma2: i32,
    scale: f64,
}

fn nested(pairs: &[Pair], tau: f64, opts: &PtOptions) -> Result<C64> {
    if pairs.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let scale: f64 = pairs.iter().map(|p| p.scale).sum();
    let integrand = |t: f64| -> C64 {
        let g = (-(t / tau).powi(2)).exp();
        pairs
            .iter()
            .map(|p| p.coef * C64::from_polar(g.powi(p.sigma2), p.om_tot * t) * phase_integral_envelope(p.om1, p.a1, t))
            .sum()
    };
    let w = opts.window * tau;
    let qo = QuadOptions { rel_tol: opts.rel_tol, abs_tol: 1e-14 * scale, max_intervals: 50_000 };
    let r = integrate(integrand, -w, w, &[-tau, 0.0, tau], qo)?;
    if r.abs_err > qo.abs_tol && r.abs_err > opts.max_rel_err * r.value.norm() {
        return Err(Error::Quadrature { rel_err: r.abs_err / r.value.norm(), evals: r.evals });
    }
    Ok(r.value)
}

fn pair(coef: C64, om1: f64, s1: u32, om2: f64, s2: u32, tau: f64) -> Pair {
    let inner = (PI.sqrt() * tau).min(1.0 / om1.abs().max(1e-300));
    Pair {
        coef,
        om1,
        a1: s1 as f64 / (tau * tau),
        om_tot: om1 + om2,
        sigma2: s2 as i32,
        scale: coef.norm() * PI.sqrt() * tau * inner,
    }
}

/// ∫dt' g^{σ₂}(t') e^{iΩ₂t'} ∫_{−∞}^{t'} dt'' g^{σ₁}(t'') e^{iΩ₁t''}, g = exp(−t²/τ²).
pub fn second_order_integral(om1: f64, s1: u32, om2: f64, s2: u32, tau: f64, opts: &PtOptions) -> Result<C64> {
    nested(&[pair(C64::new(1.0, 0.0), om1, s1, om2, s2, tau)], tau, opts)
}

/// (−i/ħ)² P₁P₂ × the nested integral; Ω₁, Ω₂ are the full exponent frequencies
/// of the first and second vertex.
pub fn second_order_amplitude(v1: &Vertex, v2: &Vertex, om1: f64, om2: f64, tau: f64, opts: &PtOptions) -> Result<C64> {
    let coef = -(v1.amplitude_prefactor * v2.amplitude_prefactor) / (HBAR * HBAR);
    nested(&[pair(coef, om1, v1.envelope_power, om2, v2.envelope_power, tau)], tau, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub initial: (i32, Spin),
    pub final_state: (i32, Spin),
}

/// First- and second-order amplitudes for one transition, summed over all
/// intermediate states the field can reach.
pub fn transition_amplitude(field: &TwoColorField, px: f64, tr: Transition, opts: &PtOptions) -> Result<(C64, C64)> {
    let vs = vertices(field, px);
    let k = field.base_k();
    let w = field.base_omega();
    let tau = field.tau();
    let om = |n| kinetic_frequency(k, opts.k_z0, n);
    let (ni, si) = (tr.initial.0, tr.initial.1.index());
    let (nf, sf) = (tr.final_state.0, tr.final_state.1.index());

    let mut first = C64::new(0.0, 0.0);
    for v in &vs {
        if ni + v.delta_n == nf && v.act(si) == Some(sf) {
            first += first_order_amplitude(v, om(nf) - om(ni) - v.omega_multiple as f64 * w, tau);
        }
    }

    let mut pairs = Vec::new();
    for v1 in &vs {
        let Some(sm) = v1.act(si) else { continue };
        let nm = ni + v1.delta_n;
        for v2 in &vs {
            if nm + v2.delta_n != nf || v2.act(sm) != Some(sf) {
                continue;
            }
            let om1 = om(nm) - om(ni) - v1.omega_multiple as f64 * w;
            let om2 = om(nf) - om(nm) - v2.omega_multiple as f64 * w;
            if ((om1 + om2) * tau).abs() > opts.detuning_cutoff {
                continue;
            }
            let coef = -(v1.amplitude_prefactor * v2.amplitude_prefactor) / (HBAR * HBAR);
            pairs.push(pair(coef, om1, v1.envelope_power, om2, v2.envelope_power, tau));
        }
    }
    Ok((first, nested(&pairs, tau, opts)?))
}
