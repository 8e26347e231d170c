use serde::Serialize;

use super::basis::{LadderBasis, SpinorAmplitudes};
use super::coupling::{Coupling, Switches};
use super::evolve::{evolve, EvolveOptions, EvolveReport, PauliSystem};
use crate::constants::{HBAR, M};
use crate::error::Result;
use crate::fields::TwoColorField;
use crate::perturbation::{process_setup, Process};
use crate::pulse::{Polarization, Spin};

/// Everything one ladder run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub field: TwoColorField,
    pub k_x: f64,
    pub basis: LadderBasis,
    pub initial: (i32, Spin),
    /// Half-width of the integration window in units of τ.
    pub window: f64,
    pub switches: Switches,
    pub options: EvolveOptions,
}

pub fn run(spec: &RunSpec) -> Result<EvolveReport> {
    let coupling = Coupling::new(&spec.field, spec.k_x, spec.switches);
    let tau = spec.field.tau();
    let t0 = -spec.window * tau;
    let sys = PauliSystem { basis: spec.basis, coupling };
    let psi0 = SpinorAmplitudes::basis_state(&spec.basis, spec.initial.0, spec.initial.1, t0)?;
    evolve(&sys, &psi0, t0, spec.window * tau, &spec.options)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanScenario {
    pub lambda: f64,
    pub tau: f64,
    pub speed: f64,
    /// Polarization of the spin-flip KD runs.
    pub polarization: Polarization,
    pub ladder_max: i32,
    pub window: f64,
    pub options: EvolveOptions,
}

impl Default for ScanScenario {
    fn default() -> Self {
        ScanScenario {
            lambda: 1.064e-6,
            tau: 10e-12,
            speed: 1e7,
            polarization: Polarization::LinearY,
            ladder_max: 12,
            window: 5.0,
            options: EvolveOptions::default(),
        }
    }
}

impl ScanScenario {
    /// Polarization used for each process: the depolarizer vanishes for linear
    /// light and the two-color KD effect needs A along the electron velocity.
    pub fn polarization_for(&self, process: Process) -> Polarization {
        match process {
            Process::Skd => self.polarization,
            Process::Depolarizer => Polarization::CircularPlus,
            Process::TwoColorKd => Polarization::LinearX,
            Process::RegularKd => Polarization::LinearY,
        }
    }

    pub fn run_spec(&self, process: Process, intensity: f64) -> Result<(RunSpec, (i32, Spin))> {
        let s = process_setup(process, intensity, self.speed, self.lambda, self.tau, Some(self.polarization_for(process)))?;
        let k = s.field.base_k();
        let basis = LadderBasis::symmetric(self.ladder_max, k, M * self.speed / HBAR)?;
        Ok((
            RunSpec {
                field: s.field,
                k_x: basis.k_x,
                basis,
                initial: s.transition.initial,
                window: self.window,
                switches: Switches::default(),
                options: self.options,
            },
            s.transition.final_state,
        ))
    }
}

/// Final-state probability of `process` from a ladder run.
pub fn process_probability(process: Process, intensity: f64, sc: &ScanScenario) -> Result<(f64, EvolveReport)> {
    let (spec, fin) = sc.run_spec(process, intensity)?;
    let rep = run(&spec)?;
    Ok((rep.psi.get(fin.0, fin.1).norm_sqr(), rep))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub intensity: f64,
    pub p_skd: Option<f64>,
    pub p_depol: Option<f64>,
    pub p_2color: Option<f64>,
    pub p_regular: Option<f64>,
    /// Error messages of failed points, empty when all succeeded.
    pub status: Vec<String>,
}

/// Probabilities of the four processes at each intensity. Failures are recorded
/// per row rather than aborting the scan.
pub fn skd_scan(intensities: &[f64], sc: &ScanScenario, processes: &[Process]) -> Vec<ScanRow> {
    intensities
        .iter()
        .map(|&i| {
            let mut row = ScanRow { intensity: i, p_skd: None, p_depol: None, p_2color: None, p_regular: None, status: vec![] };
            for &p in processes {
                match process_probability(p, i, sc) {
                    Ok((v, _)) => {
                        let slot = match p {
                            Process::Skd => &mut row.p_skd,
                            Process::Depolarizer => &mut row.p_depol,
                            Process::TwoColorKd => &mut row.p_2color,
                            Process::RegularKd => &mut row.p_regular,
                        };
                        *slot = Some(v);
                    }
                    Err(e) => row.status.push(format!("{}: {e}", p.name())),
                }
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub pass: bool,
    pub max_rel_change: f64,
    pub failure: Option<String>,
}

/// Re-runs with the ladder doubled and the tolerance tightened tenfold;
/// passes when no probability above 1e-12 moves by 1% or more.
pub fn convergence_check(spec: &RunSpec) -> ConvergenceReport {
    let fail = |e: crate::Error| ConvergenceReport { pass: false, max_rel_change: f64::INFINITY, failure: Some(e.to_string()) };
    let base = match run(spec) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let b = spec.basis;
    let mut fine = spec.clone();
    let w = b.n_max - b.n_min;
    fine.basis = LadderBasis { n_min: b.n_min - w / 2, n_max: b.n_max + (w - w / 2), ..b };
    fine.options.rel_tol /= 10.0;
    fine.options.abs_tol /= 10.0;
    let refined = match run(&fine) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let mut max = 0.0f64;
    for n in b.n_min..=b.n_max {
        for s in [Spin::Up, Spin::Down] {
            let p0 = base.psi.get(n, s).norm_sqr();
            let p1 = refined.psi.get(n, s).norm_sqr();
            if p0.max(p1) > 1e-12 {
                max = max.max((p1 - p0).abs() / p0.max(p1));
            }
        }
    }
    ConvergenceReport { pass: max < 0.01, max_rel_change: max, failure: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure4Row {
    pub n: i32,
    pub p_up: f64,
    pub p_down: f64,
}

/// Final momentum/spin distribution of the spin-flip KD configuration.
pub fn figure4(intensity: f64, sc: &ScanScenario, n_show: i32) -> Result<(Vec<Figure4Row>, EvolveReport)> {
    let (spec, _) = sc.run_spec(Process::Skd, intensity)?;
    let rep = run(&spec)?;
    let rows = (-n_show..=n_show)
        .map(|n| Figure4Row { n, p_up: rep.psi.get(n, Spin::Up).norm_sqr(), p_down: rep.psi.get(n, Spin::Down).norm_sqr() })
        .collect();
    Ok((rows, rep))
}
