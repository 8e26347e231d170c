//! CODATA 2018 SI values.

pub const Q: f64 = 1.602_176_634e-19;
pub const M: f64 = 9.109_383_701_5e-31;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const C: f64 = 299_792_458.0;
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Bohr magneton, g = 2 convention.
pub const MU_B: f64 = Q * HBAR / (2.0 * M);

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Constants {
    pub q: f64,
    pub m: f64,
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
    #[serde(rename = "muB")]
    pub mu_b: f64,
}

impl Constants {
    pub const SI: Constants = Constants { q: Q, m: M, hbar: HBAR, c: C, eps0: EPS0, mu_b: MU_B };
}

impl Default for Constants {
    fn default() -> Self {
        Self::SI
    }
}
