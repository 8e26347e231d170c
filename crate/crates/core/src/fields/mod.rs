//! Plane-wave two-color vector potential, its Fourier decomposition, and
//! focused paraxial pulses.

mod paraxial;

pub use paraxial::{paraxial_eb, ParaxialPulse};

use crate::constants::C;
use crate::error::{Error, Result};
use crate::pulse::{Direction, LaserPulseSpec};
use crate::C64;

/// amplitude · e^{i·delta_n·k·z} · e^{−i·omega_multiple·ω·t} · exp(−t²/τ²)^envelope_power,
/// with k, ω the base (harmonic 1) wavenumber and frequency. Scalar lists
/// (A², single components) keep their value in the matching slot and zero in the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub amplitude_x: C64,
    pub amplitude_y: C64,
    pub delta_n: i32,
    pub omega_multiple: i32,
    pub envelope_power: u32,
}

impl FourierTerm {
    /// Sum of both slots; equals the component value for single-component lists.
    pub fn value(&self) -> C64 {
        self.amplitude_x + self.amplitude_y
    }

    pub fn conj(&self) -> Self {
        FourierTerm {
            amplitude_x: self.amplitude_x.conj(),
            amplitude_y: self.amplitude_y.conj(),
            delta_n: -self.delta_n,
            omega_multiple: -self.omega_multiple,
            envelope_power: self.envelope_power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Ax,
    Ay,
    ASq,
    Bx,
    By,
}

/// A set of plane-wave pulses sharing base wavelength and duration.
/// The canonical configuration is an ω pulse along +z and a 2ω pulse along −z.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoColorField {
    pub pulses: Vec<LaserPulseSpec>,
}

impl TwoColorField {
    pub fn new(lo: LaserPulseSpec, hi: LaserPulseSpec) -> Result<Self> {
        if lo.harmonic != 1 || hi.harmonic != 2 {
            return Err(Error::InvalidParameter("two-color field needs harmonics 1 and 2".into()));
        }
        if lo.direction == hi.direction {
            return Err(Error::InvalidParameter("two-color pulses must counter-propagate".into()));
        }
        Self::from_pulses(vec![lo, hi])
    }

    /// Arbitrary pulse set (single beam, standing wave, ...).
    pub fn from_pulses(pulses: Vec<LaserPulseSpec>) -> Result<Self> {
        if let Some(p0) = pulses.first() {
            for p in &pulses {
                p.validate()?;
                if p.base_wavelength != p0.base_wavelength || p.duration != p0.duration {
                    return Err(Error::InvalidParameter("pulses must share base wavelength and duration".into()));
                }
            }
        }
        Ok(TwoColorField { pulses })
    }

    pub fn base_omega(&self) -> f64 {
        self.pulses.first().map(|p| p.omega() / p.harmonic as f64).unwrap_or(0.0)
    }

    pub fn base_k(&self) -> f64 {
        self.base_omega() / C
    }

    pub fn tau(&self) -> f64 {
        self.pulses.first().map(|p| p.duration).unwrap_or(1.0)
    }

    fn phase(p: &LaserPulseSpec, z: f64, t: f64) -> f64 {
        let w = p.omega();
        p.direction.sign() * w / C * z - w * t + p.cep
    }
}

/// Real vector potential (A_x, A_y).
pub fn vector_potential(field: &TwoColorField, z: f64, t: f64) -> (f64, f64) {
    let mut a = (0.0, 0.0);
    for p in &field.pulses {
        let d = p.derived();
        let g = (-(t / p.duration).powi(2)).exp();
        let (ex, ey) = p.polarization.unit_vector();
        let e = C64::from_polar(d.a0 * g, TwoColorField::phase(p, z, t));
        a.0 += (ex * e).re;
        a.1 += (ey * e).re;
    }
    a
}

/// B_x = −∂A_y/∂z, B_y = ∂A_x/∂z.
pub fn magnetic_field(field: &TwoColorField, z: f64, t: f64) -> (f64, f64) {
    let mut b = (0.0, 0.0);
    for p in &field.pulses {
        let d = p.derived();
        let g = (-(t / p.duration).powi(2)).exp();
        let (ex, ey) = p.polarization.unit_vector();
        let dz = C64::new(0.0, p.direction.sign() * d.k) * C64::from_polar(d.a0 * g, TwoColorField::phase(p, z, t));
        b.0 -= (ey * dz).re;
        b.1 += (ex * dz).re;
    }
    b
}

fn vector_terms(field: &TwoColorField) -> Vec<FourierTerm> {
    let mut out = Vec::new();
    for p in &field.pulses {
        let d = p.derived();
        if d.a0 == 0.0 {
            continue;
        }
        let (ex, ey) = p.polarization.unit_vector();
        let c = C64::from_polar(0.5 * d.a0, p.cep);
        let h = p.harmonic as i32;
        let t = FourierTerm {
            amplitude_x: ex * c,
            amplitude_y: ey * c,
            delta_n: h * p.direction.sign_i(),
            omega_multiple: h,
            envelope_power: 1,
        };
        out.push(t);
        out.push(t.conj());
    }
    out
}

fn merge(terms: Vec<FourierTerm>) -> Vec<FourierTerm> {
    let scale = terms.iter().map(|t| t.amplitude_x.norm() + t.amplitude_y.norm()).fold(0.0, f64::max);
    let mut out: Vec<FourierTerm> = Vec::new();
    for t in terms {
        match out.iter_mut().find(|o| {
            o.delta_n == t.delta_n && o.omega_multiple == t.omega_multiple && o.envelope_power == t.envelope_power
        }) {
            Some(o) => {
                o.amplitude_x += t.amplitude_x;
                o.amplitude_y += t.amplitude_y;
            }
            None => out.push(t),
        }
    }
    out.retain(|t| t.amplitude_x.norm() + t.amplitude_y.norm() > 1e-14 * scale);
    out.sort_by_key(|t| (t.delta_n, t.omega_multiple));
    out
}

pub fn fourier_terms(field: &TwoColorField, which: Component) -> Vec<FourierTerm> {
    let z = C64::new(0.0, 0.0);
    let vt = vector_terms(field);
    let k = field.base_k();
    let terms: Vec<FourierTerm> = match which {
        Component::Ax => vt.iter().map(|t| FourierTerm { amplitude_y: z, ..*t }).collect(),
        Component::Ay => vt.iter().map(|t| FourierTerm { amplitude_x: z, ..*t }).collect(),
        Component::ASq => {
            let mut v = Vec::new();
            for a in &vt {
                for b in &vt {
                    v.push(FourierTerm {
                        amplitude_x: a.amplitude_x * b.amplitude_x + a.amplitude_y * b.amplitude_y,
                        amplitude_y: z,
                        delta_n: a.delta_n + b.delta_n,
                        omega_multiple: a.omega_multiple + b.omega_multiple,
                        envelope_power: 2,
                    });
                }
            }
            v
        }
        Component::Bx => vt
            .iter()
            .map(|t| FourierTerm {
                amplitude_x: -C64::new(0.0, t.delta_n as f64 * k) * t.amplitude_y,
                amplitude_y: z,
                ..*t
            })
            .collect(),
        Component::By => vt
            .iter()
            .map(|t| FourierTerm {
                amplitude_x: z,
                amplitude_y: C64::new(0.0, t.delta_n as f64 * k) * t.amplitude_x,
                ..*t
            })
            .collect(),
    };
    merge(terms)
}

/// Σ value·e^{i(δ k z − m ω t)}·g^p.
pub fn eval_terms(terms: &[FourierTerm], k: f64, omega: f64, tau: f64, z: f64, t: f64) -> C64 {
    let g = (-(t / tau).powi(2)).exp();
    terms
        .iter()
        .map(|tm| {
            tm.value() * C64::from_polar(g.powi(tm.envelope_power as i32), tm.delta_n as f64 * k * z - tm.omega_multiple as f64 * omega * t)
        })
        .sum()
}

/// Convenience constructor for the canonical ω(+z) / 2ω(−z) geometry.
pub fn standard_two_color(
    i_lo: f64,
    i_hi: f64,
    lambda: f64,
    tau: f64,
    pol: crate::pulse::Polarization,
) -> Result<TwoColorField> {
    let lo = LaserPulseSpec::new(i_lo, lambda, 1, tau, pol, Direction::PlusZ)?;
    let hi = LaserPulseSpec::new(i_hi, lambda, 2, tau, pol, Direction::MinusZ)?;
    TwoColorField::new(lo, hi)
}
