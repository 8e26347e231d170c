//! Adaptive explicit Runge-Kutta 8(5,3) for complex linear systems, with
//! Hairer's step-size control and no per-step allocation.

use super::tableau::{A, B, BHH, C, ER};
use crate::error::{Error, Result};
use crate::C64;

pub trait ComplexSystem {
    fn rhs(&mut self, t: f64, y: &[C64], dy: &mut [C64]);

    /// Called after every accepted step; an error aborts the integration.
    fn accepted(&mut self, _t: f64, _y: &[C64]) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Zero picks the initial step automatically.
    pub h_init: f64,
    pub max_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { rtol: 1e-9, atol: 1e-12, h_max: f64::INFINITY, h_init: 0.0, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

fn weighted_norm(v: &[C64], y: &[C64], y2: &[C64], o: &StepOptions) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        let sre = o.atol + o.rtol * y[i].re.abs().max(y2[i].re.abs());
        let sim = o.atol + o.rtol * y[i].im.abs().max(y2[i].im.abs());
        s += (v[i].re / sre).powi(2) + (v[i].im / sim).powi(2);
    }
    (s / (2 * v.len()).max(1) as f64).sqrt()
}

/// Integrates `y` in place from `t0` to `t1` (t1 > t0).
pub fn integrate<S: ComplexSystem>(sys: &mut S, t0: f64, t1: f64, y: &mut [C64], o: &StepOptions) -> Result<StepStats> {
    let n = y.len();
    let mut st = StepStats::default();
    if t1 <= t0 || n == 0 {
        return Ok(st);
    }
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 12];
    let mut ytmp = vec![C64::new(0.0, 0.0); n];
    let mut ynew = vec![C64::new(0.0, 0.0); n];
    let mut inc = vec![C64::new(0.0, 0.0); n];

    let mut t = t0;
    sys.rhs(t, y, &mut k[0]);
    st.evals += 1;

    let mut h = if o.h_init > 0.0 { o.h_init } else { initial_step(sys, t, y, &k[0], o, &mut ytmp, &mut ynew) };
    st.evals += 1;
    h = h.min(o.h_max).min(t1 - t0);
    let mut last_rejected = false;

    loop {
        if st.accepted + st.rejected >= o.max_steps {
            return Err(Error::MaxSteps { t, steps: st.accepted + st.rejected });
        }
        if 0.1 * h.abs() <= f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::StepUnderflow { t, h });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..12 {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..s {
                    let a = A[s - 1][j];
                    if a != 0.0 {
                        acc += k[j][i] * a;
                    }
                }
                ytmp[i] = y[i] + acc * h;
            }
            let (_, tail) = k.split_at_mut(s);
            sys.rhs(t + C[s] * h, &ytmp, &mut tail[0]);
        }
        st.evals += 11;
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..12 {
                if B[j] != 0.0 {
                    acc += k[j][i] * B[j];
                }
            }
            inc[i] = acc;
            ynew[i] = y[i] + acc * h;
        }
        // fifth- and third-order error estimates, combined as in Hairer's DOP853
        for i in 0..n {
            ytmp[i] = inc[i] - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
        }
        let err2 = weighted_norm(&ytmp, y, &ynew, o).powi(2);
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..12 {
                if ER[j] != 0.0 {
                    acc += k[j][i] * ER[j];
                }
            }
            ytmp[i] = acc;
        }
        let err1 = weighted_norm(&ytmp, y, &ynew, o).powi(2);
        let mut deno = err1 + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err1 / deno.sqrt();
        if !err.is_finite() {
            return Err(Error::NonFinite(t));
        }

        let fac11 = err.powf(0.125);
        let fac = (fac11 / 0.9).clamp(1.0 / 6.0, 3.0);
        if err <= 1.0 {
            st.accepted += 1;
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            sys.accepted(t, y)?;
            if last {
                return Ok(st);
            }
            sys.rhs(t, y, &mut k[0]);
            st.evals += 1;
            let mut hnew = (h / fac).min(o.h_max);
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew;
        } else {
            st.rejected += 1;
            last_rejected = true;
            h /= (fac11 / 0.9).min(3.0);
        }
    }
}

fn initial_step<S: ComplexSystem>(
    sys: &mut S,
    t: f64,
    y: &[C64],
    f0: &[C64],
    o: &StepOptions,
    y1: &mut [C64],
    f1: &mut [C64],
) -> f64 {
    let d0 = weighted_norm(y, y, y, o);
    let d1 = weighted_norm(f0, y, y, o);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(o.h_max);
    for i in 0..y.len() {
        y1[i] = y[i] + f0[i] * h0;
    }
    sys.rhs(t + h0, y1, f1);
    for i in 0..y.len() {
        y1[i] = f1[i] - f0[i];
    }
    let d2 = weighted_norm(y1, y, y, o) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(1.0 / 8.0) };
    (100.0 * h0).min(h1).min(o.h_max)
}
