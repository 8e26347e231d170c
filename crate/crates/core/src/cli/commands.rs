//! The computations behind each subcommand. Each returns its files in memory;
//! nothing touches the disk here.

use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::output::{csv_bytes, json_bytes, num, Artifacts, RunStatus};
use crate::classical::{run_scenario, ParticleState};
use crate::config::{Grid, Scenario};
use crate::constants::{HBAR, M};
use crate::error::{Error, Result};
use crate::fields::{magnetic_field, vector_potential};
use crate::pauli::{self, Figure4Row, LadderBasis, RunSpec, ScanScenario, Switches};
use crate::perturbation::{process_setup, skd_amplitude_with, transition_amplitude, Process, Transition};
use crate::pulse::Spin;
use crate::scaling::{scaling_probability, ScalingLaw};

/// Maps `f` over `items` on up to `threads` workers pulling from a shared
/// counter, so uneven job costs balance out. Order is preserved.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    let next = AtomicUsize::new(0);
    let parts: Vec<Vec<(usize, R)>> = std::thread::scope(|s| {
        let hs: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= items.len() {
                            return done;
                        }
                        done.push((i, f(&items[i])));
                    }
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    for (i, r) in parts.into_iter().flatten() {
        out[i] = Some(r);
    }
    out.into_iter().map(|r| r.expect("every item computed")).collect()
}

pub fn scaling_law(p: Process) -> Option<ScalingLaw> {
    match p {
        Process::Skd => Some(ScalingLaw::SKD),
        Process::Depolarizer => Some(ScalingLaw::DEPOLARIZER),
        Process::TwoColorKd => Some(ScalingLaw::TWO_COLOR_KD),
        Process::RegularKd => None,
    }
}

/// Intensity exponent each process should show at low intensity.
pub fn expected_slope(p: Process) -> f64 {
    match p {
        Process::Skd | Process::TwoColorKd => 3.0,
        Process::Depolarizer | Process::RegularKd => 2.0,
    }
}

fn short_name(p: Process) -> &'static str {
    match p {
        Process::Skd => "skd",
        Process::Depolarizer => "depol",
        Process::TwoColorKd => "2color",
        Process::RegularKd => "regular",
    }
}

fn slope_key(p: Process) -> &'static str {
    match p {
        Process::Skd => "skd",
        Process::Depolarizer => "depolarizer",
        Process::TwoColorKd => "two_color",
        Process::RegularKd => "regular",
    }
}

#[derive(Debug, Clone, Serialize)]
struct Amplitude {
    process: Process,
    method: &'static str,
    intensity: f64,
    speed: f64,
    lambda: f64,
    tau: f64,
    amplitude_re: f64,
    amplitude_im: f64,
    probability: f64,
    p_scaling: Option<f64>,
    ratio: Option<f64>,
    breakdown: bool,
}

#[derive(Serialize)]
struct Records<'a, T> {
    scenario_hash: &'a str,
    manifest: String,
    records: T,
}

fn records<'a, T>(hash: &'a str, command: &str, records: T) -> Records<'a, T> {
    Records { scenario_hash: hash, manifest: format!("{command}_manifest.json"), records }
}

pub fn table1(sc: &Scenario, hash: &str) -> Result<Artifacts> {
    let opts = sc.pt_options();
    let results = par_map(&sc.table1, sc.solver.threads, |r| {
        let s = process_setup(r.process, r.intensity, r.speed, r.lambda, r.tau, None)?;
        skd_amplitude_with(&s, &opts)
    });
    let mut art = Artifacts::default();
    let mut rows = Vec::new();
    let mut recs = Vec::new();
    for (r, res) in sc.table1.iter().zip(&results) {
        let law = scaling_law(r.process).map(|l| scaling_probability(&l, r.intensity, r.speed, r.lambda, r.tau));
        let p_scaling = match &law {
            Some(Ok(p)) => Some(*p),
            _ => None,
        };
        let name = format!("{}@{:e}", r.process.name(), r.intensity);
        art.runs.push(RunStatus::from_result(format!("{name} quadrature"), res));
        if let Some(l) = &law {
            art.runs.push(RunStatus::from_result(format!("{name} scaling"), l));
        }
        let quad = res.as_ref().ok();
        let ratio = quad.zip(p_scaling).map(|(q, s)| q.probability / s);
        rows.push(vec![
            r.process.name().to_string(),
            num(Some(r.intensity)),
            num(Some(r.speed)),
            num(Some(r.lambda)),
            num(Some(r.tau)),
            num(p_scaling),
            num(quad.map(|q| q.probability)),
            num(ratio),
        ]);
        if let Some(q) = quad {
            recs.push(Amplitude {
                process: r.process,
                method: "quadrature",
                intensity: r.intensity,
                speed: r.speed,
                lambda: r.lambda,
                tau: r.tau,
                amplitude_re: q.amplitude.re,
                amplitude_im: q.amplitude.im,
                probability: q.probability,
                p_scaling,
                ratio,
                breakdown: q.breakdown,
            });
        }
    }
    art.add("table1.csv", csv_bytes(&["process", "I", "v", "lambda", "tau", "P_scaling", "P_quadrature", "ratio"], &rows)?);
    art.add("table1.json", json_bytes(&records(hash, "table1", recs))?);
    Ok(art)
}

/// Least-squares line through (log10 x, log10 y).
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.log10(), y.log10());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let d = n * sxx - sx * sx;
    if d.abs() < 1e-300 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / d;
    Some((slope, (sy - slope * sx) / n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub points: usize,
    pub i_min: Option<f64>,
    pub i_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Fits the points with 0 < P < `p_max`; fewer than `min_points` gives no slope.
pub fn fit_slope(data: &[(f64, Option<f64>)], p_max: f64, min_points: usize) -> SlopeFit {
    let pts: Vec<(f64, f64)> =
        data.iter().filter_map(|&(i, p)| p.filter(|p| *p > 0.0 && *p < p_max && p.is_finite()).map(|p| (i, p))).collect();
    let i_min = pts.iter().map(|p| p.0).reduce(f64::min);
    let i_max = pts.iter().map(|p| p.0).reduce(f64::max);
    if pts.len() < min_points {
        return SlopeFit {
            slope: None,
            intercept: None,
            points: pts.len(),
            i_min,
            i_max,
            note: Some(format!("{} usable points, {} needed", pts.len(), min_points)),
        };
    }
    let fit = loglog_fit(&pts);
    SlopeFit { slope: fit.map(|f| f.0), intercept: fit.map(|f| f.1), points: pts.len(), i_min, i_max, note: None }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessSlopes {
    pub expected: f64,
    pub pt: SlopeFit,
    pub se: SlopeFit,
    /// Largest |P_se − P_pt|/P_pt over points with P_pt below 1e-3.
    pub max_rel_gap: Option<f64>,
    pub gap_points: usize,
}

/// One intensity-scan point: perturbation theory and, optionally, the ladder solver.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub process: Process,
    pub intensity: f64,
    pub pt: std::result::Result<f64, String>,
    pub se: Option<std::result::Result<f64, String>>,
    /// Set when the ladder had to be widened.
    pub note: Option<String>,
}

pub fn figure3_point(process: Process, intensity: f64, scan: &ScanScenario, sc: &Scenario, pauli_on: bool) -> PointResult {
    let pt = process_setup(process, intensity, scan.speed, scan.lambda, scan.tau, Some(scan.polarization_for(process)))
        .and_then(|s| skd_amplitude_with(&s, &sc.pt_options()))
        .map(|a| a.probability)
        .map_err(|e| e.to_string());
    let mut note = None;
    let se = pauli_on.then(|| {
        let mut s = *scan;
        loop {
            match pauli::process_probability(process, intensity, &s) {
                Err(Error::Boundary { .. }) if s.ladder_max < WIDEN_LIMIT * scan.ladder_max => {
                    s.ladder_max *= 2;
                    note = Some(format!("{}_se: ladder widened to {}", process.name(), s.ladder_max));
                }
                r => return r.map(|r| r.0).map_err(|e| e.to_string()),
            }
        }
    });
    PointResult { process, intensity, pt, se, note }
}

/// Boundary failures retry on a doubled ladder up to this multiple of the
/// configured truncation.
pub const WIDEN_LIMIT: i32 = 4;

pub fn figure3_points(sc: &Scenario) -> Result<Vec<PointResult>> {
    let scan = sc.scan();
    let mut jobs = Vec::new();
    for p in Process::ALL {
        if let Some(g) = sc.figure3.grid(p) {
            jobs.extend(g.points()?.into_iter().map(|i| (p, i)));
        }
    }
    let done = AtomicUsize::new(0);
    Ok(par_map(&jobs, sc.solver.threads, |&(p, i)| {
        let r = figure3_point(p, i, &scan, sc, sc.figure3.pauli);
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        eprintln!("figure3 [{k}/{}] {} I={i:.3e}", jobs.len(), p.name());
        r
    }))
}

pub fn slopes(sc: &Scenario, points: &[PointResult]) -> BTreeMap<&'static str, ProcessSlopes> {
    let f3 = &sc.figure3;
    let mut out = BTreeMap::new();
    for p in Process::ALL {
        let mine: Vec<&PointResult> = points.iter().filter(|r| r.process == p).collect();
        if mine.is_empty() {
            continue;
        }
        let pt: Vec<(f64, Option<f64>)> = mine.iter().map(|r| (r.intensity, r.pt.as_ref().ok().copied())).collect();
        let se: Vec<(f64, Option<f64>)> =
            mine.iter().map(|r| (r.intensity, r.se.as_ref().and_then(|s| s.as_ref().ok().copied()))).collect();
        let gaps: Vec<f64> = pt
            .iter()
            .zip(&se)
            .filter_map(|(a, b)| match (a.1, b.1) {
                (Some(x), Some(y)) if x > 0.0 && x < 1e-3 => Some((y - x).abs() / x),
                _ => None,
            })
            .collect();
        out.insert(
            slope_key(p),
            ProcessSlopes {
                expected: expected_slope(p),
                pt: fit_slope(&pt, f3.fit_max_probability, f3.min_fit_points),
                se: fit_slope(&se, f3.fit_max_probability, f3.min_fit_points),
                max_rel_gap: gaps.iter().copied().reduce(f64::max),
                gap_points: gaps.len(),
            },
        );
    }
    out
}

fn intensity_key(i: f64) -> i64 {
    (i.log10() * 1e9).round() as i64
}

#[derive(Serialize)]
struct SlopesDoc<'a> {
    scenario_hash: &'a str,
    manifest: &'static str,
    fit_max_probability: f64,
    min_fit_points: usize,
    grids: BTreeMap<&'static str, Option<Grid>>,
    slopes: BTreeMap<&'static str, ProcessSlopes>,
}

const FIGURE3_GP: &str = "\
# gnuplot script for figure3.csv
set datafile separator ','
set key autotitle columnhead
set logscale xy
set format xy '10^{%L}'
set xlabel 'I (W/m^2)'
set ylabel 'P'
plot for [c=2:9] 'figure3.csv' using 1:c with linespoints
";

pub fn figure3(sc: &Scenario, hash: &str) -> Result<Artifacts> {
    let points = figure3_points(sc)?;
    let mut art = Artifacts::default();
    let col = |p: Process| Process::ALL.iter().position(|q| *q == p).expect("known process");
    let mut table: BTreeMap<i64, (f64, [Option<f64>; 8], Vec<String>)> = BTreeMap::new();
    for r in &points {
        let row = table.entry(intensity_key(r.intensity)).or_insert((r.intensity, [None; 8], vec![]));
        let c = 2 * col(r.process);
        let name = format!("{}@{:e}", r.process.name(), r.intensity);
        match &r.pt {
            Ok(v) => row.1[c] = Some(*v),
            Err(e) => row.2.push(format!("{}_pt: {e}", r.process.name())),
        }
        art.runs.push(RunStatus { name: format!("{name} pt"), ok: r.pt.is_ok(), error: r.pt.clone().err() });
        if let Some(se) = &r.se {
            match se {
                Ok(v) => row.1[c + 1] = Some(*v),
                Err(e) => row.2.push(format!("{}_se: {e}", r.process.name())),
            }
            art.runs.push(RunStatus { name: format!("{name} se"), ok: se.is_ok(), error: se.clone().err() });
        }
        if let Some(n) = &r.note {
            row.2.push(n.clone());
        }
    }
    let mut header = vec!["intensity".to_string()];
    for p in Process::ALL {
        header.push(format!("p_{}_pt", short_name(p)));
        header.push(format!("p_{}_se", short_name(p)));
    }
    header.push("status".into());
    let rows: Vec<Vec<String>> = table
        .values()
        .map(|(i, vals, status)| {
            let mut r = vec![num(Some(*i))];
            r.extend(vals.iter().map(|v| num(*v)));
            r.push(if status.is_empty() { "ok".into() } else { status.join("; ") });
            r
        })
        .collect();
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    art.add("figure3.csv", csv_bytes(&hdr, &rows)?);
    let doc = SlopesDoc {
        scenario_hash: hash,
        manifest: "figure3_manifest.json",
        fit_max_probability: sc.figure3.fit_max_probability,
        min_fit_points: sc.figure3.min_fit_points,
        grids: Process::ALL.iter().map(|p| (slope_key(*p), sc.figure3.grid(*p))).collect(),
        slopes: slopes(sc, &points),
    };
    art.add("slopes.json", json_bytes(&doc)?);
    art.add("figure3.gp", FIGURE3_GP.as_bytes().to_vec());
    Ok(art)
}

#[derive(Serialize)]
struct Figure4Doc<'a> {
    scenario_hash: &'a str,
    manifest: &'static str,
    intensity: f64,
    frame: pauli::Frame,
    norm_drift: f64,
    boundary_max: f64,
    stats: pauli::StepStats,
    spin_down_peak_n: Option<i32>,
    p_up_initial: Option<f64>,
    rows: &'a [Figure4Row],
}

pub fn figure4(sc: &Scenario, hash: &str) -> Result<Artifacts> {
    let f4 = sc.figure4;
    let res = pauli::figure4(f4.intensity, &sc.scan(), f4.n_show);
    let mut art = Artifacts::default();
    art.runs.push(RunStatus::from_result(format!("skd@{:e}", f4.intensity), &res));
    let (rows, rep) = res?;
    let csv_rows: Vec<Vec<String>> =
        rows.iter().map(|r| vec![r.n.to_string(), num(Some(r.p_up)), num(Some(r.p_down))]).collect();
    art.add("figure4.csv", csv_bytes(&["n", "p_up", "p_down"], &csv_rows)?);
    let n0 = sc.electron.initial_ladder_index;
    let doc = Figure4Doc {
        scenario_hash: hash,
        manifest: "figure4_manifest.json",
        intensity: f4.intensity,
        frame: rep.frame,
        norm_drift: rep.norm_drift,
        boundary_max: rep.boundary_max,
        stats: rep.stats,
        spin_down_peak_n: rows.iter().max_by(|a, b| a.p_down.total_cmp(&b.p_down)).map(|r| r.n),
        p_up_initial: rows.iter().find(|r| r.n == n0).map(|r| r.p_up),
        rows: &rows,
    };
    art.add("figure4.json", json_bytes(&doc)?);
    Ok(art)
}

fn offset_label(x: f64) -> &'static str {
    if x < 0.0 {
        "m"
    } else if x > 0.0 {
        "p"
    } else {
        "0"
    }
}

#[derive(Serialize)]
struct Figure5Doc<'a> {
    scenario_hash: &'a str,
    manifest: &'static str,
    omega0: f64,
    dt: f64,
    files: Vec<String>,
    initial_conditions: Vec<ParticleState>,
    report: crate::classical::ClassicalReport,
}

pub fn figure5(sc: &Scenario, hash: &str) -> Result<Artifacts> {
    let mut cs = sc.classical_resolved();
    if sc.output.full_resolution {
        cs.stride = 1;
    }
    let res = run_scenario(&cs, sc.solver.threads);
    let mut art = Artifacts::default();
    art.runs.push(RunStatus::from_result("classical sweep", &res));
    let (trs, report) = res?;
    let nominal = cs.nominal_grid();
    let x0 = cs.x_center();
    let mut files = Vec::new();
    for (k, tr) in trs.iter().enumerate() {
        let ic = nominal[k];
        let name = format!("trajectory_x{}_z{}.csv", offset_label(ic.r[0] - x0), offset_label(ic.r[2]));
        let rows: Vec<Vec<String>> = tr
            .states
            .iter()
            .zip(&tr.gamma_minus_1)
            .map(|(s, g)| {
                [s.t, s.r[0], s.r[1], s.r[2], s.p[0], s.p[1], s.p[2], *g].iter().map(|v| num(Some(*v))).collect()
            })
            .collect();
        art.add(
            name.clone(),
            csv_bytes(&["w0t", "k0x", "k0y", "k0z", "px_mc", "py_mc", "pz_mc", "gamma_minus_1"], &rows)?,
        );
        files.push(name);
    }
    let doc = Figure5Doc {
        scenario_hash: hash,
        manifest: "figure5_manifest.json",
        omega0: cs.omega0(),
        dt: cs.dt(),
        files,
        initial_conditions: cs.ic_grid(),
        report,
    };
    art.add("diagnostics.json", json_bytes(&doc)?);
    Ok(art)
}

#[derive(Serialize)]
struct StateRecord {
    final_n: i32,
    final_spin: Spin,
    method: &'static str,
    amplitude_re: f64,
    amplitude_im: f64,
    probability: f64,
}

#[derive(Serialize)]
struct RunDoc<'a> {
    scenario_hash: &'a str,
    manifest: &'static str,
    frame: pauli::Frame,
    norm_drift: f64,
    boundary_max: f64,
    stats: pauli::StepStats,
    records: Vec<StateRecord>,
}

/// Ladder evolution of the scenario's own pulses and electron, with the
/// perturbative amplitude of every final state within `figure4.n_show`
/// except the initial one.
pub fn run(sc: &Scenario, hash: &str) -> Result<Artifacts> {
    let field = sc.field()?;
    let e = &sc.electron;
    let basis = LadderBasis::symmetric(sc.solver.ladder_max, field.base_k(), M * e.speed / HBAR)?;
    let initial = (e.initial_ladder_index, e.initial_spin);
    let spec = RunSpec {
        field: field.clone(),
        k_x: basis.k_x,
        basis,
        initial,
        window: sc.solver.window,
        switches: Switches::default(),
        options: sc.evolve_options(),
    };
    let mut art = Artifacts::default();
    let res = pauli::run(&spec);
    art.runs.push(RunStatus::from_result("pauli", &res));
    let rep = res?;

    let n_show = sc.figure4.n_show.min(sc.solver.ladder_max);
    let states: Vec<(i32, Spin)> = (-n_show..=n_show).flat_map(|n| [(n, Spin::Up), (n, Spin::Down)]).collect();
    let opts = sc.pt_options();
    let pt = par_map(&states, sc.solver.threads, |&fin| {
        transition_amplitude(&field, M * e.speed, Transition { initial, final_state: fin }, &opts).map(|(a, b)| a + b)
    });
    let mut records = Vec::new();
    let mut table: BTreeMap<i32, [Option<f64>; 4]> = BTreeMap::new();
    for (&(n, s), p) in states.iter().zip(&pt) {
        let se = rep.psi.get(n, s);
        let col = s.index();
        let row = table.entry(n).or_insert([None; 4]);
        row[col] = Some(se.norm_sqr());
        records.push(StateRecord {
            final_n: n,
            final_spin: s,
            method: "pauli",
            amplitude_re: se.re,
            amplitude_im: se.im,
            probability: se.norm_sqr(),
        });
        art.runs.push(RunStatus::from_result(format!("pt n={n} {s:?}"), p));
        // the diagonal second-order term is dominated by the ac Stark phase and is no probability
        if (n, s) == initial {
            continue;
        }
        if let Ok(a) = p {
            row[2 + col] = Some(a.norm_sqr());
            records.push(StateRecord {
                final_n: n,
                final_spin: s,
                method: "perturbation",
                amplitude_re: a.re,
                amplitude_im: a.im,
                probability: a.norm_sqr(),
            });
        }
    }
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|(n, v)| {
            let mut r = vec![n.to_string()];
            r.extend(v.iter().map(|x| num(*x)));
            r
        })
        .collect();
    art.add("run.csv", csv_bytes(&["n", "p_up_se", "p_down_se", "p_up_pt", "p_down_pt"], &rows)?);
    let doc = RunDoc {
        scenario_hash: hash,
        manifest: "run_manifest.json",
        frame: rep.frame,
        norm_drift: rep.norm_drift,
        boundary_max: rep.boundary_max,
        stats: rep.stats,
        records,
    };
    art.add("run.json", json_bytes(&doc)?);
    Ok(art)
}

/// Field snapshot on a z grid spanning two base wavelengths, one block per time.
pub fn field_snapshot(sc: &Scenario, times: &[f64], points: usize) -> Result<Artifacts> {
    if points < 2 || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config("field snapshot needs ≥ 2 points and finite times".into()));
    }
    let field = sc.field()?;
    let lambda = 2.0 * std::f64::consts::PI / field.base_k();
    let mut rows = Vec::with_capacity(points * times.len());
    for &t in times {
        for j in 0..points {
            let z = 2.0 * lambda * j as f64 / (points - 1) as f64;
            let (ax, ay) = vector_potential(&field, z, t);
            let (bx, by) = magnetic_field(&field, z, t);
            rows.push([z, t, ax, ay, bx, by].iter().map(|v| num(Some(*v))).collect());
        }
    }
    let mut art = Artifacts::default();
    art.add("fields.csv", csv_bytes(&["z", "t", "A_x", "A_y", "B_x", "B_y"], &rows)?);
    art.runs.push(RunStatus { name: "fields".into(), ok: true, error: None });
    Ok(art)
}
