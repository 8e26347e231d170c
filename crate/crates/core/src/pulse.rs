use serde::{Deserialize, Serialize};

use crate::constants::{C, EPS0, M, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    LinearX,
    LinearY,
    CircularPlus,
    CircularMinus,
}

impl Polarization {
    /// Complex unit polarization vector (ε_x, ε_y).
    pub fn unit_vector(self) -> (crate::C64, crate::C64) {
        use crate::C64;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Polarization::LinearX => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            Polarization::LinearY => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
            Polarization::CircularPlus => (C64::new(s, 0.0), C64::new(0.0, s)),
            Polarization::CircularMinus => (C64::new(s, 0.0), C64::new(0.0, -s)),
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, Polarization::LinearX | Polarization::LinearY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    PlusZ,
    MinusZ,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::PlusZ => 1.0,
            Direction::MinusZ => -1.0,
        }
    }

    pub fn sign_i(self) -> i32 {
        match self {
            Direction::PlusZ => 1,
            Direction::MinusZ => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// One laser pulse. The field envelope is exp(−t²/τ²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPulse")]
pub struct LaserPulseSpec {
    pub intensity: f64,
    pub base_wavelength: f64,
    pub harmonic: u32,
    pub duration: f64,
    pub focus_diameter: f64,
    pub polarization: Polarization,
    pub direction: Direction,
    /// Carrier-envelope phase at focus (rad).
    pub cep: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    intensity: f64,
    base_wavelength: f64,
    harmonic: u32,
    duration: f64,
    #[serde(default = "default_diameter")]
    focus_diameter: f64,
    polarization: Polarization,
    direction: Direction,
    #[serde(default)]
    cep: f64,
}

fn default_diameter() -> f64 {
    100e-6
}

impl TryFrom<RawPulse> for LaserPulseSpec {
    type Error = Error;
    fn try_from(r: RawPulse) -> Result<Self> {
        let mut p = LaserPulseSpec::new(
            r.intensity,
            r.base_wavelength,
            r.harmonic,
            r.duration,
            r.polarization,
            r.direction,
        )?;
        p.focus_diameter = r.focus_diameter;
        p.cep = r.cep;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    pub omega: f64,
    pub k: f64,
    pub a0: f64,
    pub e0: f64,
    pub b0: f64,
    /// Normalized amplitude qA0/(mc).
    pub a0_norm: f64,
}

impl LaserPulseSpec {
    pub fn new(
        intensity: f64,
        base_wavelength: f64,
        harmonic: u32,
        duration: f64,
        polarization: Polarization,
        direction: Direction,
    ) -> Result<Self> {
        let p = LaserPulseSpec {
            intensity,
            base_wavelength,
            harmonic,
            duration,
            focus_diameter: default_diameter(),
            polarization,
            direction,
            cep: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.intensity >= 0.0 && self.intensity.is_finite()) {
            return bad("intensity must be finite and >= 0");
        }
        if !(self.base_wavelength > 0.0 && self.base_wavelength.is_finite()) {
            return bad("wavelength must be > 0");
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be > 0");
        }
        if !(self.focus_diameter > 0.0) {
            return bad("focus diameter must be > 0");
        }
        if self.harmonic != 1 && self.harmonic != 2 {
            return bad("harmonic must be 1 or 2");
        }
        if !self.cep.is_finite() {
            return bad("cep must be finite");
        }
        Ok(())
    }

    pub fn with_intensity(mut self, intensity: f64) -> Self {
        self.intensity = intensity;
        self
    }

    pub fn omega(&self) -> f64 {
        self.harmonic as f64 * 2.0 * std::f64::consts::PI * C / self.base_wavelength
    }

    pub fn derived(&self) -> Derived {
        derived_quantities(self)
    }
}

pub fn derived_quantities(p: &LaserPulseSpec) -> Derived {
    let omega = p.omega();
    let k = omega / C;
    let a0 = (2.0 * p.intensity / (C * EPS0)).sqrt() / omega;
    Derived { omega, k, a0, e0: omega * a0, b0: k * a0, a0_norm: Q * a0 / (M * C) }
}

/// Intensity whose vector-potential amplitude is `a0` at angular frequency `omega`.
pub fn intensity_from_a0(a0: f64, omega: f64) -> f64 {
    C * EPS0 * omega * omega * a0 * a0 / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawElectron")]
pub struct ElectronSpec {
    /// Speed along +x (m/s).
    pub speed: f64,
    /// Initial longitudinal momentum in units of ħk.
    pub initial_ladder_index: i32,
    pub initial_spin: Spin,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElectron {
    speed: f64,
    initial_ladder_index: i32,
    initial_spin: Spin,
}

impl TryFrom<RawElectron> for ElectronSpec {
    type Error = Error;
    fn try_from(r: RawElectron) -> Result<Self> {
        ElectronSpec::new(r.speed, r.initial_ladder_index, r.initial_spin)
    }
}

impl ElectronSpec {
    pub fn new(speed: f64, n0: i32, spin: Spin) -> Result<Self> {
        if !(speed >= 0.0 && speed < C) {
            return Err(Error::InvalidParameter(format!("electron speed {speed} must lie in [0, c)")));
        }
        Ok(ElectronSpec { speed, initial_ladder_index: n0, initial_spin: spin })
    }

    pub fn px(&self) -> f64 {
        M * self.speed
    }
}
