//! Scenario documents: the two pulses, the electron, solver settings, output
//! options and per-command sections, all with defaults reproducing the
//! reference runs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::classical::ClassicalScenario;
use crate::error::{Error, Result};
use crate::fields::TwoColorField;
use crate::pauli::{EvolveOptions, Frame, ScanScenario};
use crate::perturbation::{Process, PtOptions};
use crate::pulse::{Direction, ElectronSpec, LaserPulseSpec, Polarization, Spin};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative tolerance of the ladder ODE and the perturbation quadrature.
    pub tolerance: f64,
    pub abs_tol: f64,
    pub ladder_max: i32,
    /// Half-width of the integration window in units of τ.
    pub window: f64,
    pub frame: Frame,
    pub boundary_limit: f64,
    pub max_steps: usize,
    /// Classical step: (2ω0 period)/dt_divisor.
    pub dt_divisor: f64,
    pub stride: usize,
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let e = EvolveOptions::default();
        SolverConfig {
            tolerance: e.rel_tol,
            abs_tol: e.abs_tol,
            ladder_max: 12,
            window: 5.0,
            frame: e.frame,
            boundary_limit: e.boundary_limit,
            max_steps: e.max_steps,
            dt_divisor: 200.0,
            stride: 50,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Write every classical step instead of every `stride`-th.
    pub full_resolution: bool,
}

/// Log-spaced intensity grid, `points_per_decade` per factor of ten.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points_per_decade: u32,
}

impl Grid {
    pub fn new(min: f64, max: f64, points_per_decade: u32) -> Self {
        Grid { min, max, points_per_decade }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) || self.points_per_decade == 0 {
            return Err(Error::Config(format!("empty or invalid intensity grid {:?}", self)));
        }
        let decades = (self.max / self.min).log10();
        let n = (decades * self.points_per_decade as f64).round() as i64;
        Ok((0..=n).map(|j| self.min * 10f64.powf(j as f64 / self.points_per_decade as f64)).collect())
    }

    pub fn decades(&self) -> f64 {
        (self.max / self.min).log10()
    }
}

/// Intensity grids per process. Each process is scanned where it is
/// perturbative: regular and two-color KD saturate long before 1e16 W/m², and
/// the depolarizer is detuned by the spin-dependent light shift above 1e18.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure3Config {
    pub skd: Option<Grid>,
    pub depolarizer: Option<Grid>,
    pub two_color_kd: Option<Grid>,
    pub regular_kd: Option<Grid>,
    /// Run the ladder solver as well as perturbation theory.
    pub pauli: bool,
    /// Points above this probability are left out of the slope fits.
    pub fit_max_probability: f64,
    pub min_fit_points: usize,
}

impl Default for Figure3Config {
    fn default() -> Self {
        Figure3Config {
            skd: Some(Grid::new(1e16, 1e19, 8)),
            depolarizer: Some(Grid::new(1e15, 1e18, 8)),
            two_color_kd: Some(Grid::new(1e13, 1e16, 8)),
            regular_kd: Some(Grid::new(1e8, 1e11, 8)),
            pauli: true,
            fit_max_probability: 0.02,
            min_fit_points: 6,
        }
    }
}

impl Figure3Config {
    pub fn grid(&self, p: Process) -> Option<Grid> {
        match p {
            Process::Skd => self.skd,
            Process::Depolarizer => self.depolarizer,
            Process::TwoColorKd => self.two_color_kd,
            Process::RegularKd => self.regular_kd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure4Config {
    pub intensity: f64,
    pub n_show: i32,
}

impl Default for Figure4Config {
    fn default() -> Self {
        Figure4Config { intensity: 1e18, n_show: 7 }
    }
}

/// One row of the scaling-law benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Row {
    pub process: Process,
    pub intensity: f64,
    pub speed: f64,
    pub lambda: f64,
    pub tau: f64,
}

pub fn default_table1() -> Vec<Table1Row> {
    let row = |process, intensity| Table1Row { process, intensity, speed: 1e7, lambda: 1.064e-6, tau: 1e-10 };
    vec![row(Process::Depolarizer, 1e18), row(Process::Skd, 1e18), row(Process::TwoColorKd, 1e15)]
}

fn default_pulses() -> [LaserPulseSpec; 2] {
    let lo = LaserPulseSpec::new(1e18, 1.064e-6, 1, 10e-12, Polarization::LinearY, Direction::PlusZ).expect("valid default");
    let hi = LaserPulseSpec::new(4e18, 1.064e-6, 2, 10e-12, Polarization::LinearY, Direction::MinusZ).expect("valid default");
    [lo, hi]
}

fn default_electron() -> ElectronSpec {
    ElectronSpec::new(1e7, 2, Spin::Up).expect("valid default")
}

fn default_table1_opt() -> Vec<Table1Row> {
    default_table1()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// ω and 2ω pulses; their wavelength, duration, polarization and electron
    /// speed also set the `figure3` and `figure4` scans.
    #[serde(default = "default_pulses")]
    pub pulses: [LaserPulseSpec; 2],
    #[serde(default = "default_electron")]
    pub electron: ElectronSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_table1_opt")]
    pub table1: Vec<Table1Row>,
    #[serde(default)]
    pub figure3: Figure3Config,
    #[serde(default)]
    pub figure4: Figure4Config,
    #[serde(default)]
    pub classical: ClassicalScenario,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            pulses: default_pulses(),
            electron: default_electron(),
            solver: SolverConfig::default(),
            output: OutputConfig::default(),
            table1: default_table1(),
            figure3: Figure3Config::default(),
            figure4: Figure4Config::default(),
            classical: ClassicalScenario::default(),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.field().map_err(cfg)?;
        let s = &self.solver;
        if !(s.tolerance > 0.0 && s.tolerance < 1e-3 && s.abs_tol > 0.0) {
            return Err(Error::Config(format!("solver tolerance {} must lie in (0, 1e-3)", s.tolerance)));
        }
        if s.ladder_max < 1 || !(s.window > 0.0) || !(s.boundary_limit > 0.0) || s.threads == 0 || s.max_steps == 0 {
            return Err(Error::Config("ladder_max, window, boundary_limit, threads and max_steps must be positive".into()));
        }
        let n0 = self.electron.initial_ladder_index;
        if n0.abs() > s.ladder_max - 2 {
            return Err(Error::Config(format!("initial ladder index {n0} lies in the boundary rungs of |n| ≤ {}", s.ladder_max)));
        }
        self.classical_resolved().validate().map_err(cfg)?;
        for row in &self.table1 {
            if [row.intensity, row.speed, row.lambda, row.tau].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::Config(format!("table1 row {:?} needs positive parameters", row)));
            }
        }
        let f3 = &self.figure3;
        for p in Process::ALL {
            if let Some(g) = f3.grid(p) {
                g.points()?;
            }
        }
        if Process::ALL.iter().all(|p| f3.grid(*p).is_none()) {
            return Err(Error::Config("figure3 has no intensity grid".into()));
        }
        if !(f3.fit_max_probability > 0.0) || f3.min_fit_points < 2 {
            return Err(Error::Config("figure3 fit needs fit_max_probability > 0 and ≥ 2 points".into()));
        }
        if !(self.figure4.intensity >= 0.0) || self.figure4.n_show < 0 {
            return Err(Error::Config("figure4 needs intensity ≥ 0 and n_show ≥ 0".into()));
        }
        Ok(())
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(t) = o.tolerance {
            self.solver.tolerance = t;
        }
        if let Some(l) = o.ladder_max {
            self.solver.ladder_max = l;
        }
        if let Some(d) = o.dt_divisor {
            self.solver.dt_divisor = d;
        }
        if let Some(t) = o.threads {
            self.solver.threads = t;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn field(&self) -> Result<TwoColorField> {
        TwoColorField::new(self.pulses[0], self.pulses[1])
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        let s = &self.solver;
        EvolveOptions { rel_tol: s.tolerance, abs_tol: s.abs_tol, frame: s.frame, boundary_limit: s.boundary_limit, max_steps: s.max_steps }
    }

    pub fn pt_options(&self) -> PtOptions {
        PtOptions { rel_tol: (0.1 * self.solver.tolerance).max(1e-13), ..PtOptions::default() }
    }

    /// Ladder scan settings shared by figures 3 and 4.
    pub fn scan(&self) -> ScanScenario {
        let lo = &self.pulses[0];
        ScanScenario {
            lambda: lo.base_wavelength,
            tau: lo.duration,
            speed: self.electron.speed,
            polarization: lo.polarization,
            ladder_max: self.solver.ladder_max,
            window: self.solver.window,
            options: self.evolve_options(),
        }
    }

    /// Classical section with the solver's step settings applied.
    pub fn classical_resolved(&self) -> ClassicalScenario {
        ClassicalScenario { dt_divisor: self.solver.dt_divisor, stride: self.solver.stride, ..self.classical }
    }

    /// Canonical JSON of the fully resolved scenario.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// Command-line values that take precedence over the scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub ladder_max: Option<i32>,
    pub dt_divisor: Option<f64>,
    pub threads: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roundtrips_through_json() {
        let s = Scenario::default();
        s.validate().unwrap();
        let back = Scenario::from_json(&s.canonical_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.hash(), s.hash());
    }

    #[test]
    fn minimal_document_uses_defaults() {
        let s = Scenario::from_json("{}").unwrap();
        assert_eq!(s, Scenario::default());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(Scenario::from_json("{\"bogus\": 1}"), Err(Error::Config(_))));
        assert!(Scenario::from_json("{\"figure3\": {\"skd\": {\"min\": 1e18, \"max\": 1e16, \"points_per_decade\": 8}}}").is_err());
        assert!(Scenario::from_json("{\"figure3\": {\"skd\": null, \"depolarizer\": null, \"two_color_kd\": null, \"regular_kd\": null}}").is_err());
        assert!(Scenario::from_json("{\"solver\": {\"ladder_max\": 3}}").is_err());
        let mut s = Scenario::default();
        s.pulses[1].base_wavelength = 0.8e-6;
        assert!(Scenario::from_json(&s.canonical_json()).is_err());
    }

    #[test]
    fn grid_spacing() {
        let g = Grid::new(1e16, 1e19, 8).points().unwrap();
        assert_eq!(g.len(), 25);
        assert!((g[24] / 1e19 - 1.0).abs() < 1e-12);
        assert!((g[8] / 1e17 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overrides_apply_and_validate() {
        let o = Overrides { tolerance: Some(1e-8), ladder_max: Some(16), dt_divisor: Some(400.0), threads: Some(2) };
        let s = Scenario::default().with_overrides(&o).unwrap();
        assert_eq!((s.solver.tolerance, s.solver.ladder_max, s.solver.threads), (1e-8, 16, 2));
        assert_eq!(s.classical_resolved().dt_divisor, 400.0);
        assert!(Scenario::default().with_overrides(&Overrides { tolerance: Some(-1.0), ..o }).is_err());
    }
}
