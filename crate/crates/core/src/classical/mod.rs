//! Relativistic single-electron tracer in dimensionless units: positions in
//! 1/k0, momenta in mc, time in 1/ω0.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{C, HBAR, M, Q};
use crate::error::{Error, Result};
use crate::fields::ParaxialPulse;
use crate::pulse::{intensity_from_a0, Direction, LaserPulseSpec, Polarization};

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn axpy(a: f64, x: V3, y: V3) -> V3 {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleState {
    /// k0·r
    pub r: V3,
    /// p/(mc)
    pub p: V3,
    /// ω0·t
    pub t: f64,
}

impl ParticleState {
    pub fn gamma(&self) -> f64 {
        (1.0 + dot(self.p, self.p)).sqrt()
    }

    pub fn velocity(&self) -> V3 {
        let g = self.gamma();
        [self.p[0] / g, self.p[1] / g, self.p[2] / g]
    }
}

/// Field seen by the electron, already multiplied by its charge:
/// dp/dt = e + v × b with e = qE/(mcω0), b = qB/(mω0).
pub trait ClassicalField {
    fn eb(&self, r: V3, t: f64) -> (V3, V3);
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StaticField {
    pub e: V3,
    pub b: V3,
}

impl ClassicalField for StaticField {
    fn eb(&self, _r: V3, _t: f64) -> (V3, V3) {
        (self.e, self.b)
    }
}

/// Focused pulses in SI, evaluated for an electron (charge −q).
#[derive(Debug, Clone, PartialEq)]
pub struct FocusedPulses {
    pub pulses: Vec<ParaxialPulse>,
    pub omega0: f64,
}

impl ClassicalField for FocusedPulses {
    fn eb(&self, r: V3, t: f64) -> (V3, V3) {
        let k0 = self.omega0 / C;
        let rs = [r[0] / k0, r[1] / k0, r[2] / k0];
        let (e, b) = crate::fields::paraxial_eb(&self.pulses, rs, t / self.omega0);
        let fe = -Q / (M * C * self.omega0);
        let fb = -Q / (M * self.omega0);
        ([e[0] * fe, e[1] * fe, e[2] * fe], [b[0] * fb, b[1] * fb, b[2] * fb])
    }
}

/// Largest allowed |dt|: a hundredth of the ω0 period.
pub const MAX_DT: f64 = 2.0 * PI / 100.0;

/// Drift half step, Boris kick with fields at the midpoint, drift half step.
/// Negative `dt` integrates backwards.
pub fn step<F: ClassicalField + ?Sized>(s: &ParticleState, dt: f64, field: &F) -> Result<ParticleState> {
    if !(dt.abs() <= MAX_DT) || dt == 0.0 {
        return Err(Error::InvalidParameter(format!("time step {dt} outside (0, 2π/100]")));
    }
    let h = 0.5 * dt;
    let rm = axpy(h, s.velocity(), s.r);
    let (e, b) = field.eb(rm, s.t + h);
    if !e.iter().chain(b.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite(s.t + h));
    }
    let pm = axpy(h, e, s.p);
    let gm = (1.0 + dot(pm, pm)).sqrt();
    let tv = [b[0] * h / gm, b[1] * h / gm, b[2] * h / gm];
    let sf = 2.0 / (1.0 + dot(tv, tv));
    let pp = axpy(1.0, cross(pm, tv), pm);
    let pr = axpy(sf, cross(pp, [tv[0], tv[1], tv[2]]), pm);
    let p = axpy(h, e, pr);
    let mut out = ParticleState { r: rm, p, t: s.t + dt };
    out.r = axpy(h, out.velocity(), rm);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ParticleState>,
    pub gamma_minus_1: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, s: ParticleState) {
        self.times.push(s.t);
        self.gamma_minus_1.push(dot(s.p, s.p) / (1.0 + s.gamma()));
        self.states.push(s);
    }

    pub fn last(&self) -> &ParticleState {
        self.states.last().expect("trajectories hold the initial state")
    }
}

/// Integrates to `t_end`, sampling every `stride` steps. The step count is
/// rounded up to a whole number of strides so the final state is a sample.
pub fn run_trajectory<F: ClassicalField + ?Sized>(ic: ParticleState, field: &F, t_end: f64, dt: f64, stride: usize) -> Result<Trajectory> {
    if stride == 0 || !(dt > 0.0) || !(t_end > ic.t) {
        return Err(Error::InvalidParameter("need stride ≥ 1, dt > 0 and t_end after the initial time".into()));
    }
    let samples = ((t_end - ic.t) / (dt * stride as f64)).ceil() as usize;
    let mut tr = Trajectory { times: Vec::with_capacity(samples + 1), states: Vec::with_capacity(samples + 1), gamma_minus_1: vec![] };
    tr.push(ic);
    let mut s = ic;
    for k in 1..=samples * stride {
        s = step(&s, dt, field)?;
        // accumulating t drifts; pin it to the grid
        s.t = ic.t + k as f64 * dt;
        if k % stride == 0 {
            tr.push(s);
        }
    }
    Ok(tr)
}

/// Parameters of the two-pulse crossing run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalScenario {
    /// Wavelength of the ω0 pulse (m).
    pub lambda: f64,
    pub a0_lo: f64,
    pub a0_hi: f64,
    pub tau: f64,
    /// Focal spot size (m); a diameter unless `spot_is_radius`.
    pub spot_size: f64,
    pub spot_is_radius: bool,
    /// ω0 t at which both pulses peak at the origin.
    pub focus_time: f64,
    /// v0/c along +x.
    pub beta0: f64,
    /// Center of the x grid in 1/k0; by default −focus_time·beta0 so the
    /// central electron crosses the axis at focus.
    pub x_center: Option<f64>,
    pub dx: f64,
    pub dz: f64,
    /// The grid fixes where the free electron would be at t = 0; integration
    /// starts this much earlier (ω0 t) on the same straight line, so the
    /// electron enters the beam adiabatically through its transverse profile.
    pub lead_time: f64,
    /// dt = (period of the 2ω0 pulse)/dt_divisor.
    pub dt_divisor: f64,
    pub stride: usize,
    pub t_end: f64,
}

impl Default for ClassicalScenario {
    fn default() -> Self {
        ClassicalScenario {
            lambda: 1e-6,
            a0_lo: 0.03,
            a0_hi: 0.02,
            tau: 10e-12,
            spot_size: 100e-6,
            spot_is_radius: false,
            focus_time: 4000.0,
            beta0: 1.0 / 30.0,
            x_center: None,
            dx: 100.0,
            dz: PI / 4.0,
            lead_time: 30_000.0,
            dt_divisor: 200.0,
            stride: 50,
            t_end: 40_000.0,
        }
    }
}

impl ClassicalScenario {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.lambda, self.tau, self.spot_size, self.beta0, self.dt_divisor, self.t_end];
        if pos.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.beta0 >= 1.0 || self.stride == 0 {
            return Err(Error::InvalidParameter("classical scenario needs positive λ, τ, spot, dt divisor, t_end and 0 < β0 < 1".into()));
        }
        if self.a0_lo < 0.0 || self.a0_hi < 0.0 || !self.focus_time.is_finite() || !(self.lead_time >= 0.0) {
            return Err(Error::InvalidParameter("a0 and lead time must be ≥ 0".into()));
        }
        if self.dt() > MAX_DT {
            return Err(Error::InvalidParameter(format!("dt divisor {} gives a step above 2π/100", self.dt_divisor)));
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * C / self.lambda
    }

    pub fn waist(&self) -> f64 {
        if self.spot_is_radius {
            self.spot_size
        } else {
            0.5 * self.spot_size
        }
    }

    pub fn dt(&self) -> f64 {
        PI / self.dt_divisor
    }

    pub fn x_center(&self) -> f64 {
        self.x_center.unwrap_or(-self.focus_time * self.beta0)
    }

    /// ω0 (+z) and 2ω0 (−z) pulses, linearly polarized along y.
    pub fn field(&self) -> Result<FocusedPulses> {
        self.validate()?;
        let w0 = self.omega0();
        let mk = |a0: f64, h: u32, dir: Direction| -> Result<ParaxialPulse> {
            let i = intensity_from_a0(a0 * M * C / Q, h as f64 * w0);
            let p = LaserPulseSpec::new(i, self.lambda, h, self.tau, Polarization::LinearY, dir)?;
            Ok(ParaxialPulse { pulse: p, w0: self.waist(), t_focus: self.focus_time / w0, z_focus: 0.0 })
        };
        Ok(FocusedPulses { pulses: vec![mk(self.a0_lo, 1, Direction::PlusZ)?, mk(self.a0_hi, 2, Direction::MinusZ)?], omega0: w0 })
    }

    /// Nine free-electron states at t = 0 over
    /// x ∈ {X0−Δx, X0, X0+Δx} × z ∈ {−Δz, 0, Δz}.
    pub fn nominal_grid(&self) -> Vec<ParticleState> {
        let g0 = 1.0 / (1.0 - self.beta0 * self.beta0).sqrt();
        let x0 = self.x_center();
        let mut v = Vec::with_capacity(9);
        for dx in [-self.dx, 0.0, self.dx] {
            for dz in [-self.dz, 0.0, self.dz] {
                v.push(ParticleState { r: [x0 + dx, 0.0, dz], p: [g0 * self.beta0, 0.0, 0.0], t: 0.0 });
            }
        }
        v
    }

    /// The nominal grid moved back by `lead_time` along the free trajectory.
    pub fn ic_grid(&self) -> Vec<ParticleState> {
        self.nominal_grid()
            .into_iter()
            .map(|mut s| {
                s.r[0] -= self.beta0 * self.lead_time;
                s.t = -self.lead_time;
                s
            })
            .collect()
    }
}

/// Runs every initial state, spreading them over up to `threads` workers.
pub fn run_sweep<F: ClassicalField + Sync>(ics: &[ParticleState], field: &F, t_end: f64, dt: f64, stride: usize, threads: usize) -> Result<Vec<Trajectory>> {
    let threads = threads.clamp(1, ics.len().max(1));
    let chunk = ics.len().div_ceil(threads).max(1);
    let parts: Vec<Result<Vec<Trajectory>>> = std::thread::scope(|sc| {
        let handles: Vec<_> = ics
            .chunks(chunk)
            .map(|c| sc.spawn(move || c.iter().map(|ic| run_trajectory(*ic, field, t_end, dt, stride)).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("trajectory worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(ics.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Sweeps the scenario's initial grid and summarizes it.
pub fn run_scenario(sc: &ClassicalScenario, threads: usize) -> Result<(Vec<Trajectory>, ClassicalReport)> {
    let field = sc.field()?;
    let trs = run_sweep(&sc.ic_grid(), &field, sc.t_end, sc.dt(), sc.stride, threads)?;
    let rep = diagnostics(&trs, sc.omega0())?;
    Ok((trs, rep))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryDiagnostics {
    pub max_gamma_minus_1: f64,
    /// v_x changed sign at some sample.
    pub reflected: bool,
    pub final_dpz_mc: f64,
    pub final_dpz_hbar_k0: f64,
    /// Half the peak-to-peak p_y (mc).
    pub quiver_py: f64,
    pub peak_abs_pz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalReport {
    pub trajectories: Vec<TrajectoryDiagnostics>,
    pub max_gamma_minus_1: f64,
    pub reflections: usize,
    pub max_abs_dpz_mc: f64,
    pub max_abs_dpz_hbar_k0: f64,
}

/// `omega0` sets the recoil unit ħk0.
pub fn diagnostics(trajectories: &[Trajectory], omega0: f64) -> Result<ClassicalReport> {
    if trajectories.is_empty() {
        return Err(Error::InvalidParameter("diagnostics need at least one trajectory".into()));
    }
    let recoil = HBAR * omega0 / (M * C * C);
    let per: Vec<TrajectoryDiagnostics> = trajectories
        .iter()
        .map(|tr| {
            let s0 = tr.states[0];
            let sign0 = s0.p[0].signum();
            let (lo, hi) = tr.states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.p[1]), b.max(s.p[1])));
            let dpz = tr.last().p[2] - s0.p[2];
            TrajectoryDiagnostics {
                max_gamma_minus_1: tr.gamma_minus_1.iter().cloned().fold(0.0, f64::max),
                reflected: tr.states.iter().any(|s| s.p[0].signum() != sign0),
                final_dpz_mc: dpz,
                final_dpz_hbar_k0: dpz / recoil,
                quiver_py: 0.5 * (hi - lo),
                peak_abs_pz: tr.states.iter().map(|s| (s.p[2] - s0.p[2]).abs()).fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(ClassicalReport {
        max_gamma_minus_1: per.iter().map(|d| d.max_gamma_minus_1).fold(0.0, f64::max),
        reflections: per.iter().filter(|d| d.reflected).count(),
        max_abs_dpz_mc: per.iter().map(|d| d.final_dpz_mc.abs()).fold(0.0, f64::max),
        max_abs_dpz_hbar_k0: per.iter().map(|d| d.final_dpz_hbar_k0.abs()).fold(0.0, f64::max),
        trajectories: per,
    })
}
