use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::engine::{kinetic_frequency, transition_amplitude, PtOptions, Transition};
use super::{Method, ProcessAmplitude};
use crate::constants::{C, EPS0, HBAR, M, MU_B, Q};
use crate::error::{Error, Result};
use crate::fields::TwoColorField;
use crate::integrals::{integrate, QuadOptions};
use crate::pulse::{Direction, LaserPulseSpec, Polarization, Spin};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    RegularKd,
    TwoColorKd,
    Skd,
    Depolarizer,
}

impl Process {
    pub const ALL: [Process; 4] = [Process::Skd, Process::Depolarizer, Process::TwoColorKd, Process::RegularKd];

    pub fn name(self) -> &'static str {
        match self {
            Process::RegularKd => "regular_kd",
            Process::TwoColorKd => "two_color_kd",
            Process::Skd => "skd",
            Process::Depolarizer => "depolarizer",
        }
    }

    pub fn default_polarization(self) -> Polarization {
        match self {
            Process::RegularKd => Polarization::LinearY,
            Process::TwoColorKd => Polarization::LinearX,
            Process::Skd | Process::Depolarizer => Polarization::CircularPlus,
        }
    }
}

/// Field configuration and initial/final states defining one process.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSetup {
    pub process: Process,
    pub field: TwoColorField,
    pub px: f64,
    pub transition: Transition,
}

/// Builds the field for `process`. `intensity` is the ω-beam intensity; the 2ω
/// beam carries the same vector-potential amplitude (four times the intensity).
/// The depolarizer uses the ω beam alone and the regular KD effect a standing
/// wave of two counter-propagating ω beams.
pub fn process_setup(
    process: Process,
    intensity: f64,
    v: f64,
    lambda: f64,
    tau: f64,
    polarization: Option<Polarization>,
) -> Result<ProcessSetup> {
    let pol = polarization.unwrap_or(process.default_polarization());
    let lo = LaserPulseSpec::new(intensity, lambda, 1, tau, pol, Direction::PlusZ)?;
    let hi = LaserPulseSpec::new(4.0 * intensity, lambda, 2, tau, pol, Direction::MinusZ)?;
    let (field, initial, final_state) = match process {
        Process::RegularKd => {
            let back = LaserPulseSpec::new(intensity, lambda, 1, tau, pol, Direction::MinusZ)?;
            (TwoColorField::from_pulses(vec![lo, back])?, (1, Spin::Up), (-1, Spin::Up))
        }
        Process::TwoColorKd => (TwoColorField::new(lo, hi)?, (2, Spin::Up), (-2, Spin::Up)),
        Process::Skd => (TwoColorField::new(lo, hi)?, (2, Spin::Up), (-2, Spin::Down)),
        Process::Depolarizer => (TwoColorField::from_pulses(vec![lo])?, (2, Spin::Up), (2, Spin::Down)),
    };
    if !(v >= 0.0 && v < C) {
        return Err(Error::InvalidParameter(format!("speed {v} outside [0, c)")));
    }
    Ok(ProcessSetup { process, field, px: M * v, transition: Transition { initial, final_state } })
}

/// Perturbative amplitude of a process from the vertex engine.
pub fn skd_amplitude_with(setup: &ProcessSetup, opts: &PtOptions) -> Result<ProcessAmplitude> {
    let (first, second) = transition_amplitude(&setup.field, setup.px, setup.transition, opts)?;
    Ok(ProcessAmplitude::new(setup.process, first + second, Method::Quadrature))
}

fn a0(intensity: f64, lambda: f64) -> (f64, f64, f64) {
    let w = 2.0 * PI * C / lambda;
    ((2.0 * intensity / (C * EPS0)).sqrt() / w, w, w / C)
}

/// Standing-wave Kapitza-Dirac amplitude between ±ħk in the Bragg regime.
pub fn regular_kd_amplitude(intensity: f64, lambda: f64, tau: f64, method: Method) -> Result<ProcessAmplitude> {
    let w = 2.0 * PI * C / lambda;
    let pre = C64::new(0.0, -Q * Q * intensity / (HBAR * M * C * EPS0 * w * w));
    let time = match method {
        Method::ClosedForm | Method::Asymptotic => (PI / 2.0).sqrt() * tau,
        Method::Quadrature => {
            let k = w / C;
            let wfi = kinetic_frequency(k, 0.0, -1) - kinetic_frequency(k, 0.0, 1);
            let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, max_intervals: 10_000 };
            let r = integrate(
                |t| C64::from_polar((-2.0 * (t / tau).powi(2)).exp(), wfi * t),
                -8.0 * tau,
                8.0 * tau,
                &[0.0],
                opts,
            )?;
            return Ok(ProcessAmplitude::new(super::Process::RegularKd, pre * r.value, method));
        }
    };
    Ok(ProcessAmplitude::new(Process::RegularKd, pre * time, method))
}

/// Unsuppressed two-color KD (electron momentum along the polarization).
pub fn two_color_kd_amplitude(intensity: f64, v: f64, lambda: f64, tau: f64, method: Method) -> Result<ProcessAmplitude> {
    match method {
        Method::Quadrature => {
            let s = process_setup(Process::TwoColorKd, intensity, v, lambda, tau, None)?;
            skd_amplitude_with(&s, &PtOptions::default())
        }
        _ => {
            let (a, _, _) = a0(intensity, lambda);
            let c = (PI / 3.0).sqrt() * 7.0 * Q.powi(3) * M * v * tau * a.powi(3) / (16.0 * HBAR * M.powi(3) * C * C);
            Ok(ProcessAmplitude::new(Process::TwoColorKd, C64::new(0.0, -c), Method::Asymptotic))
        }
    }
}

/// Spin-flip KD amplitude, (2ħk, ↑) → (−2ħk, ↓), circularly polarized beams.
pub fn skd_amplitude(intensity: f64, lambda: f64, tau: f64, method: Method) -> Result<ProcessAmplitude> {
    match method {
        Method::Quadrature => {
            let s = process_setup(Process::Skd, intensity, 0.0, lambda, tau, None)?;
            skd_amplitude_with(&s, &PtOptions::default())
        }
        _ => {
            let (a, _, k) = a0(intensity, lambda);
            let c = 3.0 * (PI / 3.0).sqrt() * MU_B * Q * Q * k * a.powi(3) * tau / (4.0 * 2f64.sqrt() * HBAR * M * M * C * C);
            Ok(ProcessAmplitude::new(Process::Skd, C64::new(0.0, -c), Method::Asymptotic))
        }
    }
}

/// Same-beam spin flip without net momentum transfer.
pub fn depolarizer_amplitude(intensity: f64, v: f64, lambda: f64, tau: f64, method: Method) -> Result<ProcessAmplitude> {
    match method {
        Method::Quadrature => {
            let s = process_setup(Process::Depolarizer, intensity, v, lambda, tau, None)?;
            skd_amplitude_with(&s, &PtOptions::default())
        }
        _ => {
            let (a, w, k) = a0(intensity, lambda);
            let wr = HBAR * k * k / (2.0 * M);
            let c = MU_B * k * a / 2f64.sqrt() * (Q * M * v * a / (2.0 * 2f64.sqrt() * M)) * tau * (PI / 2.0).sqrt() * 2.0 * wr
                / (w * w * HBAR * HBAR);
            Ok(ProcessAmplitude::new(Process::Depolarizer, C64::new(0.0, -c), Method::Asymptotic))
        }
    }
}
