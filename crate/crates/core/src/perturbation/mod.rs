//! First- and second-order time-dependent perturbation theory in the
//! (momentum-ladder × spin) basis, with named scattering processes and
//! order-of-magnitude estimators.

mod engine;
pub mod estimates;
mod processes;

pub use estimates::{estimate_first_order, estimate_second_order, larmor_probability, spurious_ratios, SpuriousReport};

pub use engine::{
    first_order_amplitude, kinetic_frequency, second_order_amplitude, second_order_integral, transition_amplitude,
    vertices, PtOptions, Transition,
};

pub use processes::{
    depolarizer_amplitude, process_setup, regular_kd_amplitude, skd_amplitude, skd_amplitude_with, two_color_kd_amplitude,
    Process, ProcessSetup,
};

use serde::{Deserialize, Serialize};

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    ASquared,
    PDotA,
    MuDotB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinAction {
    None,
    Raise,
    Lower,
}

/// One interaction term ⟨n+δ, s'| H' |n, s⟩ = prefactor · g(t)^p · e^{−i m ω t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub operator_kind: OperatorKind,
    pub delta_n: i32,
    pub omega_multiple: i32,
    pub spin_action: SpinAction,
    pub amplitude_prefactor: C64,
    pub envelope_power: u32,
}

impl Vertex {
    /// Spin index after acting on `s` (0 = up, 1 = down), if allowed.
    pub fn act(&self, s: usize) -> Option<usize> {
        match (self.spin_action, s) {
            (SpinAction::None, s) => Some(s),
            (SpinAction::Raise, 1) => Some(0),
            (SpinAction::Lower, 0) => Some(1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ClosedForm,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessAmplitude {
    pub process: Process,
    #[serde(skip)]
    pub amplitude: C64,
    pub probability: f64,
    pub method: Method,
    /// Probability above 0.1: perturbation theory is no longer trustworthy.
    pub breakdown: bool,
}

impl ProcessAmplitude {
    pub fn new(process: Process, amplitude: C64, method: Method) -> Self {
        let probability = amplitude.norm_sqr();
        ProcessAmplitude { process, amplitude, probability, method, breakdown: probability > 0.1 }
    }
}
