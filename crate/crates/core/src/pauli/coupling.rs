use super::basis::LadderBasis;
use crate::constants::{HBAR, MU_B, Q, M};
use crate::fields::{fourier_terms, Component, TwoColorField};
use crate::C64;

/// Which pieces of H' are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Switches {
    pub p_dot_a: bool,
    pub a_squared: bool,
    pub mu_dot_b: bool,
}

impl Default for Switches {
    fn default() -> Self {
        Switches { p_dot_a: true, a_squared: true, mu_dot_b: true }
    }
}

/// (scalar·1 + sx·σ_x + sy·σ_y) · g^p · e^{i δ k z − i m ω t}, amplitudes in joules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTerm {
    pub delta_n: i32,
    pub omega_multiple: i32,
    pub envelope_power: u32,
    pub scalar: C64,
    pub sx: C64,
    pub sy: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub terms: Vec<CouplingTerm>,
    pub omega: f64,
    pub k: f64,
    pub tau: f64,
}

impl Coupling {
    /// H' = −(q/m)A_x p_x + (q²/2m)A² − μB(B_xσ_x + B_yσ_y), p_x = ħk_x.
    pub fn new(field: &TwoColorField, k_x: f64, sw: Switches) -> Self {
        let zero = C64::new(0.0, 0.0);
        let mut terms: Vec<CouplingTerm> = Vec::new();
        let mut add = |d: i32, m: i32, p: u32, s: C64, x: C64, y: C64| {
            match terms.iter_mut().find(|t| t.delta_n == d && t.omega_multiple == m && t.envelope_power == p) {
                Some(t) => {
                    t.scalar += s;
                    t.sx += x;
                    t.sy += y;
                }
                None => terms.push(CouplingTerm { delta_n: d, omega_multiple: m, envelope_power: p, scalar: s, sx: x, sy: y }),
            }
        };
        let px = HBAR * k_x;
        if sw.p_dot_a && px != 0.0 {
            for t in fourier_terms(field, Component::Ax) {
                add(t.delta_n, t.omega_multiple, 1, -t.amplitude_x * (Q / M * px), zero, zero);
            }
        }
        if sw.a_squared {
            for t in fourier_terms(field, Component::ASq) {
                add(t.delta_n, t.omega_multiple, 2, t.value() * (Q * Q / (2.0 * M)), zero, zero);
            }
        }
        if sw.mu_dot_b {
            for t in fourier_terms(field, Component::Bx) {
                add(t.delta_n, t.omega_multiple, 1, zero, -t.value() * MU_B, zero);
            }
            for t in fourier_terms(field, Component::By) {
                add(t.delta_n, t.omega_multiple, 1, zero, zero, -t.value() * MU_B);
            }
        }
        terms.sort_by_key(|t| (t.delta_n, t.omega_multiple, t.envelope_power));
        Coupling { terms, omega: field.base_omega(), k: field.base_k(), tau: field.tau() }
    }

    pub fn max_delta(&self) -> i32 {
        self.terms.iter().map(|t| t.delta_n.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.scalar == C64::default() && t.sx == C64::default() && t.sy == C64::default())
    }
}

/// 2×2 spin matrix element ⟨i| s0 + sx σ_x + sy σ_y |j⟩ (0 = up, 1 = down).
pub fn spin_element(s0: C64, sx: C64, sy: C64, i: usize, j: usize) -> C64 {
    let im = C64::new(0.0, 1.0);
    match (i, j) {
        (0, 0) | (1, 1) => s0,
        (0, 1) => sx - im * sy,
        _ => sx + im * sy,
    }
}

/// ⟨m, i| H'(t) |n, j⟩ in joules. Plane-wave orthogonality picks the terms with
/// δ = m − n.
pub fn coupling_element(coupling: &Coupling, basis: &LadderBasis, m: i32, i: usize, n: i32, j: usize, t: f64) -> C64 {
    if !basis.contains(m) || !basis.contains(n) {
        return C64::new(0.0, 0.0);
    }
    let g = (-(t / coupling.tau).powi(2)).exp();
    coupling
        .terms
        .iter()
        .filter(|c| c.delta_n == m - n)
        .map(|c| {
            spin_element(c.scalar, c.sx, c.sy, i, j)
                * C64::from_polar(g.powi(c.envelope_power as i32), -(c.omega_multiple as f64) * coupling.omega * t)
        })
        .sum()
}
