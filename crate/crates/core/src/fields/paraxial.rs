use crate::constants::C;
use crate::pulse::LaserPulseSpec;
use crate::C64;

/// Lowest-order Gaussian mode polarized along y, focused at (0, 0, z_focus)
/// at time t_focus. The temporal envelope travels with the pulse:
/// exp[−(z' − c(t − t_focus))²/(cτ)²], z' the signed distance along propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaxialPulse {
    pub pulse: LaserPulseSpec,
    pub w0: f64,
    pub t_focus: f64,
    pub z_focus: f64,
}

impl ParaxialPulse {
    pub fn rayleigh_range(&self) -> f64 {
        let k = self.pulse.omega() / C;
        0.5 * k * self.w0 * self.w0
    }

    /// Adds this pulse's (E, B) at `r`, `t` into `e`, `b`.
    fn accumulate(&self, r: [f64; 3], t: f64, e: &mut [f64; 3], b: &mut [f64; 3]) {
        let d = self.pulse.derived();
        if d.a0 == 0.0 {
            return;
        }
        let s = self.pulse.direction.sign();
        let (x, y) = (r[0], r[1]);
        let zl = s * (r[2] - self.z_focus);
        let tl = t - self.t_focus;
        let zr = self.rayleigh_range();
        let w2 = self.w0 * self.w0;
        let i = C64::new(0.0, 1.0);

        let dd = C64::new(1.0, zl / zr);
        let rho2 = x * x + y * y;
        let ct = C * self.pulse.duration;
        let xi = zl - C * tl;
        let env = -(xi / ct).powi(2);
        let theta = d.k * zl - d.omega * tl + self.pulse.cep;
        let log_psi = C64::new(env, theta) - rho2 / (w2 * dd);
        let psi = C64::from(d.a0) / dd * log_psi.exp();

        // log-derivatives of psi
        let lx = -2.0 * x / (w2 * dd);
        let ly = -2.0 * y / (w2 * dd);
        let dd_dzl = i / zr;
        let lzl = -dd_dzl / dd + rho2 / (w2 * dd * dd) * dd_dzl - 2.0 * xi / (ct * ct) + i * d.k;
        let lz = lzl * s;
        let lt = C64::new(2.0 * C * xi / (ct * ct), -d.omega);

        // A_z = Re[f y psi / D] keeps ∇·A = 0 to paraxial order
        let f = -2.0 * i * s / (d.k * w2);
        let q = f * psi / dd;
        let xi_z = q * y;
        let dxi_x = xi_z * lx;
        let dxi_y = q * (1.0 + y * ly);
        let dxi_t = xi_z * lt;

        let dpsi_x = psi * lx;
        let dpsi_z = psi * lz;
        let dpsi_t = psi * lt;

        e[1] -= dpsi_t.re;
        e[2] -= dxi_t.re;
        b[0] += dxi_y.re - dpsi_z.re;
        b[1] -= dxi_x.re;
        b[2] += dpsi_x.re;
    }

    /// (A_y, A_z) of this pulse; used for divergence checks.
    pub fn vector_potential(&self, r: [f64; 3], t: f64) -> [f64; 3] {
        let d = self.pulse.derived();
        let s = self.pulse.direction.sign();
        let zl = s * (r[2] - self.z_focus);
        let tl = t - self.t_focus;
        let zr = self.rayleigh_range();
        let w2 = self.w0 * self.w0;
        let dd = C64::new(1.0, zl / zr);
        let ct = C * self.pulse.duration;
        let xi = zl - C * tl;
        let theta = d.k * zl - d.omega * tl + self.pulse.cep;
        let rho2 = r[0] * r[0] + r[1] * r[1];
        let psi = C64::from(d.a0) / dd * (C64::new(-(xi / ct).powi(2), theta) - rho2 / (w2 * dd)).exp();
        let f = C64::new(0.0, -2.0 * s / (d.k * w2));
        [0.0, psi.re, (f * r[1] * psi / dd).re]
    }
}

/// Superposed (E [V/m], B [T]) of all pulses at position `r` (m) and time `t` (s).
pub fn paraxial_eb(pulses: &[ParaxialPulse], r: [f64; 3], t: f64) -> ([f64; 3], [f64; 3]) {
    let mut e = [0.0; 3];
    let mut b = [0.0; 3];
    for p in pulses {
        p.accumulate(r, t, &mut e, &mut b);
    }
    (e, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{Direction, Polarization};

    fn pp(h: u32, dir: Direction) -> ParaxialPulse {
        let p = LaserPulseSpec::new(1e18, 1e-6, h, 1e-12, Polarization::LinearY, dir).unwrap();
        ParaxialPulse { pulse: p, w0: 20e-6, t_focus: 0.0, z_focus: 0.0 }
    }

    fn norm(v: [f64; 3]) -> f64 {
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    #[test]
    fn peak_field_at_focus() {
        let p = pp(1, Direction::PlusZ);
        let d = p.pulse.derived();
        let quarter = 0.25 * 2.0 * std::f64::consts::PI / d.omega;
        // envelope peak passes the origin at t_focus; quarter period later the carrier peaks
        let (e, _) = paraxial_eb(&[p], [0.0, 0.0, 0.0], quarter);
        assert!((norm(e) / d.e0 - 1.0).abs() < 1e-4, "{}", norm(e) / d.e0);
        let (e_off, _) = paraxial_eb(&[p], [p.w0, 0.0, 0.0], quarter);
        assert!((e_off[1] / e[1] - (-1f64).exp()).abs() < 1e-4);
    }

    #[test]
    fn field_is_curl_and_time_derivative_of_potential() {
        let p = pp(2, Direction::MinusZ);
        let h = 1e-10;
        let ht = 1e-19;
        let r = [3e-6, -5e-6, 0.2e-6];
        let t = 1e-16;
        let (e, b) = paraxial_eb(&[p], r, t);
        let a = |r: [f64; 3], t: f64| p.vector_potential(r, t);
        let ey = -(a(r, t + ht)[1] - a(r, t - ht)[1]) / (2.0 * ht);
        assert!((ey - e[1]).abs() < 1e-5 * p.pulse.derived().e0);
        let dz_ay = (a([r[0], r[1], r[2] + h], t)[1] - a([r[0], r[1], r[2] - h], t)[1]) / (2.0 * h);
        let dy_az = (a([r[0], r[1] + h, r[2]], t)[2] - a([r[0], r[1] - h, r[2]], t)[2]) / (2.0 * h);
        assert!((b[0] - (dy_az - dz_ay)).abs() < 1e-5 * p.pulse.derived().b0);
    }
}
