use std::collections::BTreeMap;

use crate::constants::{HBAR, M};
use crate::error::{Error, Result};
use crate::pulse::Spin;
use crate::C64;

/// Longitudinal momenta ħ(k_z0 + n k), n ∈ [n_min, n_max], times two spin states.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LadderBasis {
    pub n_min: i32,
    pub n_max: i32,
    pub k: f64,
    pub k_x: f64,
    pub k_z0: f64,
}

impl LadderBasis {
    pub fn new(n_min: i32, n_max: i32, k: f64, k_x: f64, k_z0: f64) -> Result<Self> {
        if !(n_min < 0 && 0 < n_max) {
            return Err(Error::InvalidParameter(format!("ladder [{n_min}, {n_max}] must straddle 0")));
        }
        if !(k > 0.0) {
            return Err(Error::InvalidParameter("photon wavenumber must be positive".into()));
        }
        Ok(LadderBasis { n_min, n_max, k, k_x, k_z0 })
    }

    pub fn symmetric(n: i32, k: f64, k_x: f64) -> Result<Self> {
        Self::new(-n, n, k, k_x, 0.0)
    }

    pub fn rungs(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        2 * self.rungs()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i32) -> bool {
        n >= self.n_min && n <= self.n_max
    }

    pub fn index(&self, n: i32, spin: Spin) -> usize {
        2 * (n - self.n_min) as usize + spin.index()
    }

    pub fn kz(&self, n: i32) -> f64 {
        self.k_z0 + n as f64 * self.k
    }

    /// ħ[k_x² + (k_z0 + n k)²]/2m.
    pub fn frequency(&self, n: i32) -> f64 {
        let kz = self.kz(n);
        HBAR * (self.k_x * self.k_x + kz * kz) / (2.0 * M)
    }
}

/// Interaction-picture coefficients: ψ = Σ C_{n,s}(t) e^{−iω_n t} |n, s⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorAmplitudes {
    pub n_min: i32,
    /// Interleaved (n, up), (n, down) amplitudes.
    pub values: Vec<C64>,
    pub time: f64,
}

impl SpinorAmplitudes {
    pub fn basis_state(basis: &LadderBasis, n: i32, spin: Spin, time: f64) -> Result<Self> {
        if !basis.contains(n) {
            return Err(Error::InvalidParameter(format!("rung {n} outside the ladder")));
        }
        let mut values = vec![C64::new(0.0, 0.0); basis.len()];
        values[basis.index(n, spin)] = C64::new(1.0, 0.0);
        Ok(SpinorAmplitudes { n_min: basis.n_min, values, time })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn n_max(&self) -> i32 {
        self.n_min + (self.values.len() / 2) as i32 - 1
    }

    pub fn get(&self, n: i32, spin: Spin) -> C64 {
        if n < self.n_min || n > self.n_max() {
            return C64::new(0.0, 0.0);
        }
        self.values[2 * (n - self.n_min) as usize + spin.index()]
    }

    /// |C|² per rung as (up, down).
    pub fn probabilities(&self) -> BTreeMap<i32, (f64, f64)> {
        self.values
            .chunks(2)
            .enumerate()
            .map(|(j, c)| (self.n_min + j as i32, (c[0].norm_sqr(), c[1].norm_sqr())))
            .collect()
    }

    /// Largest population among the two outermost rungs on either side.
    pub fn boundary_population(&self) -> f64 {
        boundary_population(&self.values)
    }
}

pub(crate) fn boundary_population(v: &[C64]) -> f64 {
    let n = v.len();
    if n < 8 {
        return v.iter().map(|c| c.norm_sqr()).sum();
    }
    let edge = |r: &[C64]| r.iter().map(|c| c.norm_sqr()).sum::<f64>();
    edge(&v[..4]).max(edge(&v[n - 4..]))
}

pub fn probabilities(psi: &SpinorAmplitudes) -> BTreeMap<i32, (f64, f64)> {
    psi.probabilities()
}
