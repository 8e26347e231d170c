//! Acceptance criteria 1–9. Each test writes one `criterion N: PASS|FAIL` line
//! to stderr (bypassing the test harness capture) and fails on FAIL.
//!
//! The intensity scans use 4 points per decade over two decades per process so
//! the suite runs in minutes on one core; `KDSIM_ACCEPTANCE_FULL=1` switches to
//! the default 8-per-decade, three-decade grids.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use kdsim::classical::{run_scenario, run_trajectory, step, ClassicalScenario, ParticleState, StaticField};
use kdsim::cli::commands::{figure3_points, slopes, PointResult, ProcessSlopes};
use kdsim::config::{Grid, Scenario};
use kdsim::integrals::{incomplete_phase_integral, PhaseMode};
use kdsim::pauli::{
    self, coupling_element, evolve, Coupling, CouplingTerm, EvolveOptions, EvolveReport, Figure4Row, Frame, LadderBasis,
    PauliSystem, ScanScenario, SpinorAmplitudes, Switches,
};
use kdsim::perturbation::{
    larmor_probability, process_setup, regular_kd_amplitude, skd_amplitude_with, spurious_ratios, two_color_kd_amplitude,
    Method, Process,
};
use kdsim::{scaling_probability, Polarization, ScalingLaw, Spin, C64};

fn report(n: u32, what: &str, pass: bool, details: &[String]) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "criterion {n} [{what}]: {}", if pass { "PASS" } else { "FAIL" });
    for d in details {
        let _ = writeln!(e, "    {d}");
    }
    assert!(pass, "criterion {n} [{what}] failed:\n{}", details.join("\n"));
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn full() -> bool {
    std::env::var("KDSIM_ACCEPTANCE_FULL").is_ok_and(|v| v == "1")
}

#[test]
fn criterion_1_scaling_law_identity() {
    let start = Instant::now();
    let rows = [
        ("depolarizer", ScalingLaw::DEPOLARIZER, 1e18, 0.00576),
        ("skd", ScalingLaw::SKD, 1e18, 0.00128),
        ("two_color_kd", ScalingLaw::TWO_COLOR_KD, 1e15, 7.4e-4),
    ];
    let mut pass = true;
    let mut d = Vec::new();
    for (name, law, i, want) in rows {
        let p = scaling_probability(&law, i, 1e7, 1.064e-6, 1e-10).unwrap();
        let ok = rel(p, want) < 0.01;
        pass &= ok;
        d.push(format!("{name}: P = {p:.5e}, reference {want:e}, relative {:.2e} (< 1e-2)", rel(p, want)));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 1.0;
    d.push(format!("runtime {secs:.2e} s (< 1 s)"));
    report(1, "scaling-law identity", pass, &d);
}

struct Scan {
    points: Vec<PointResult>,
    slopes: std::collections::BTreeMap<&'static str, ProcessSlopes>,
}

fn scan() -> &'static Scan {
    static S: OnceLock<Scan> = OnceLock::new();
    S.get_or_init(|| {
        let mut sc = Scenario::default();
        if !full() {
            let f = &mut sc.figure3;
            f.skd = Some(Grid::new(1e16, 1e18, 4));
            f.depolarizer = Some(Grid::new(1e15, 1e17, 4));
            f.two_color_kd = Some(Grid::new(1e13, 1e15, 4));
            f.regular_kd = Some(Grid::new(1e9, 1e11, 4));
        }
        let points = figure3_points(&sc).unwrap();
        let slopes = slopes(&sc, &points);
        Scan { points, slopes }
    })
}

#[test]
fn criterion_2_intensity_slopes() {
    let s = scan();
    let mut pass = true;
    let mut d = Vec::new();
    for (name, sl) in &s.slopes {
        for (method, fit) in [("pt", &sl.pt), ("se", &sl.se)] {
            let decades = fit.i_min.zip(fit.i_max).map_or(0.0, |(a, b)| (b / a).log10());
            let ok = fit.slope.is_some_and(|k| (k - sl.expected).abs() <= 0.05) && decades >= 2.0 - 1e-9;
            pass &= ok;
            d.push(format!(
                "{name} {method}: slope {} (expected {:.2} ± 0.05) from {} points over {decades:.2} decades",
                fit.slope.map_or("none".into(), |k| format!("{k:.4}")),
                sl.expected,
                fit.points
            ));
        }
    }
    pass &= s.slopes.len() == 4;
    report(2, "intensity slopes", pass, &d);
}

#[test]
fn criterion_3_method_agreement() {
    let s = scan();
    let mut pass = true;
    let mut d = Vec::new();
    let mut n = 0;
    let mut worst = 0.0f64;
    for r in s.points.iter().filter(|r| r.process == Process::Skd) {
        let Ok(pt) = r.pt else {
            pass = false;
            d.push(format!("I = {:.3e}: perturbation failed", r.intensity));
            continue;
        };
        if pt >= 1e-3 {
            continue;
        }
        match &r.se {
            Some(Ok(se)) => {
                n += 1;
                worst = worst.max(rel(*se, pt));
                pass &= rel(*se, pt) < 0.1;
            }
            other => {
                pass = false;
                d.push(format!("I = {:.3e}: ladder solver {:?}", r.intensity, other));
            }
        }
    }
    pass &= n >= 2;
    d.push(format!("SKD: {n} points with P < 1e-3, max |P_se − P_pt|/P_pt = {worst:.3e} (< 0.1)"));
    report(3, "ladder vs perturbation agreement", pass, &d);
}

#[test]
fn criterion_4_absolute_magnitude() {
    let sc = ScanScenario::default();
    let s = process_setup(Process::Skd, 1e19, sc.speed, sc.lambda, sc.tau, Some(sc.polarization)).unwrap();
    let pt = skd_amplitude_with(&s, &Default::default()).unwrap().probability;
    // the ladder spreads to |n| ≈ 40 at this intensity
    let wide = ScanScenario { ladder_max: 48, ..sc };
    let se = pauli::process_probability(Process::Skd, 1e19, &wide).map(|r| r.0);
    let within = |p: f64| (0.005..=0.02).contains(&p);
    let pass = within(pt) && se.as_ref().is_ok_and(|p| within(*p));
    let d = vec![
        format!("SKD at 1e19 W/m², τ = 10 ps, λ = 1.064 μm: perturbation P = {pt:.4e}"),
        format!("ladder solver (|n| ≤ 48) P = {:?}", se),
        "accepted band [0.005, 0.02] (factor 2 around 0.01)".into(),
    ];
    report(4, "absolute magnitude", pass, &d);
}

fn figure4_run() -> &'static (Vec<Figure4Row>, EvolveReport) {
    static F: OnceLock<(Vec<Figure4Row>, EvolveReport)> = OnceLock::new();
    F.get_or_init(|| pauli::figure4(1e18, &ScanScenario::default(), 7).unwrap())
}

#[test]
fn criterion_5_momentum_distribution() {
    let (rows, _) = figure4_run();
    let at = |n: i32| rows.iter().find(|r| r.n == n).unwrap();
    let peak = rows.iter().max_by(|a, b| a.p_down.total_cmp(&b.p_down)).unwrap();
    let p_down = at(-2).p_down;
    let survivor = at(2).p_up;
    let plus6 = at(6).p_up + at(6).p_down;
    let minus6 = at(-6).p_up + at(-6).p_down;
    let checks = [
        (peak.n == -2, format!("spin-down maximum at n = {} (want −2)", peak.n)),
        ((1e-6..=3e-5).contains(&p_down), format!("p_down(−2) = {p_down:.4e} in [1e-6, 3e-5]")),
        (survivor > 0.99, format!("p_up(+2) = {survivor:.6} > 0.99")),
        (
            plus6 > minus6,
            format!(
                "population at +6 = {plus6:.3e} (up {:.2e}, down {:.2e}) exceeds −6 = {minus6:.3e} (up {:.2e}, down {:.2e})",
                at(6).p_up,
                at(6).p_down,
                at(-6).p_up,
                at(-6).p_down
            ),
        ),
    ];
    let pass = checks.iter().all(|c| c.0);
    report(5, "momentum distribution at 1e18 W/m²", pass, &checks.map(|c| c.1));
}

#[test]
fn criterion_6_analytic_oracles() {
    let mut d = Vec::new();
    let mut pass = true;

    let q = regular_kd_amplitude(1e15, 1.064e-6, 1e-10, Method::Quadrature).unwrap().amplitude;
    let c = regular_kd_amplitude(1e15, 1.064e-6, 1e-10, Method::ClosedForm).unwrap().amplitude;
    let r = (q - c).norm() / c.norm();
    pass &= r < 1e-9;
    d.push(format!("regular KD quadrature vs closed form: relative {r:.2e} (< 1e-9)"));

    for tau in [1e-11, 1e-10] {
        let wt = 2.0 * PI * 2.998e8 / 1.064e-6 * tau;
        let q = two_color_kd_amplitude(1e15, 1e7, 1.064e-6, tau, Method::Quadrature).unwrap().amplitude;
        let a = two_color_kd_amplitude(1e15, 1e7, 1.064e-6, tau, Method::Asymptotic).unwrap().amplitude;
        let r = (q - a).norm() / q.norm();
        pass &= wt > 1e4 && r < 0.05;
        d.push(format!("two-color nested quadrature vs asymptotic at ωτ = {wt:.2e}: relative {r:.2e} (< 0.05)"));
    }

    let tau = 1e-12;
    let mut worst_above = 0.0f64;
    for j in 0..=40 {
        let wt = 100.0 * 10f64.powf(j as f64 / 20.0) * (1.0 + 1e-9);
        for sigma in [1, 2] {
            for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                for sign in [1.0, -1.0] {
                    let om = sign * wt / tau;
                    let e = incomplete_phase_integral(om, tau, sigma, t * tau, PhaseMode::Exact).unwrap();
                    let a = incomplete_phase_integral(om, tau, sigma, t * tau, PhaseMode::Asymptotic).unwrap();
                    worst_above = worst_above.max((e - a).norm() / e.norm());
                }
            }
        }
    }
    pass &= worst_above <= 0.05;
    d.push(format!("phase integral, |Ω|τ ∈ (100, 1e4], |t| ≤ τ, σ ∈ {{1, 2}}: worst exact/asymptotic gap {worst_above:.2e} (≤ 0.05)"));
    let gap = |wt: f64| {
        let e = incomplete_phase_integral(wt / tau, tau, 1, 0.0, PhaseMode::Exact).unwrap();
        let a = incomplete_phase_integral(wt / tau, tau, 1, 0.0, PhaseMode::Asymptotic).unwrap();
        (e - a).norm() / e.norm()
    };
    let (g200, g2) = (gap(200.0), gap(2.0));
    pass &= g200 < 0.02 && g2 > 0.1;
    d.push(format!("phase integral at t = 0: Ωτ = 200 gap {g200:.2e} (< 0.02), Ωτ = 2 gap {g2:.2e} (> 0.1)"));
    let auto = incomplete_phase_integral(2.0 / tau, tau, 1, 0.0, PhaseMode::Auto(50.0)).unwrap();
    let exact = incomplete_phase_integral(2.0 / tau, tau, 1, 0.0, PhaseMode::Exact).unwrap();
    pass &= auto == exact;
    d.push("automatic mode stays exact at Ωτ = 2".into());
    report(6, "analytic oracles", pass, &d);
}

/// Van der Corput sequence in base 2, mapped to (a, b).
fn spread(j: u32, a: f64, b: f64) -> f64 {
    let mut x = 0.0;
    let mut f = 0.5;
    let mut k = j + 1;
    while k > 0 {
        x += f * (k & 1) as f64;
        k >>= 1;
        f *= 0.5;
    }
    a + (b - a) * x
}

#[test]
fn criterion_7_ladder_solver_properties() {
    let mut d = Vec::new();
    let mut pass = true;

    let (_, rep) = figure4_run();
    let drift = (rep.psi.norm_sqr() - 1.0).abs();
    pass &= drift <= 1e-6;
    d.push(format!("unitarity at 1e18 W/m²: |Σ|C|² − 1| = {drift:.2e} (≤ 1e-6)"));

    let field = kdsim::fields::standard_two_color(1e18, 4e18, 1.064e-6, 10e-12, Polarization::CircularPlus).unwrap();
    let basis = LadderBasis::symmetric(6, field.base_k(), kdsim::constants::M * 1e7 / kdsim::constants::HBAR).unwrap();
    let c = Coupling::new(&field, basis.k_x, Switches::default());
    let mut worst = 0.0f64;
    for j in 0..100 {
        let t = spread(j, -30e-12, 30e-12);
        let mut scale = 0.0f64;
        let mut err = 0.0f64;
        for m in -6..=6 {
            for n in -6..=6 {
                for i in 0..2 {
                    for k in 0..2 {
                        let h = coupling_element(&c, &basis, m, i, n, k, t);
                        let hd = coupling_element(&c, &basis, n, k, m, i, t).conj();
                        scale = scale.max(h.norm());
                        err = err.max((h - hd).norm());
                    }
                }
            }
        }
        worst = worst.max(err / scale);
    }
    pass &= worst <= 1e-14;
    d.push(format!("coupling hermiticity at 100 times: worst relative asymmetry {worst:.2e} (≤ 1e-14)"));

    let sc = ScanScenario::default();
    let (mut spec, _) = sc.run_spec(Process::Skd, 1e18).unwrap();
    spec.switches = Switches { mu_dot_b: false, ..Switches::default() };
    let down = pauli::run(&spec)
        .map(|r| (spec.basis.n_min..=spec.basis.n_max).map(|n| r.psi.get(n, Spin::Down).norm_sqr()).fold(0.0, f64::max));
    pass &= down.as_ref().is_ok_and(|p| *p < 1e-20);
    d.push(format!("spin-flip exclusivity with μ·B off: max spin-down population {down:?} (< 1e-20)"));

    let omega_r = 1e12;
    let t_end = 1e-12;
    let z = C64::default();
    let term = CouplingTerm {
        delta_n: 0,
        omega_multiple: 0,
        envelope_power: 0,
        scalar: z,
        sx: C64::new(kdsim::constants::HBAR * omega_r / 2.0, 0.0),
        sy: z,
    };
    let basis = LadderBasis::symmetric(2, 1e7, 0.0).unwrap();
    let sys = PauliSystem { basis, coupling: Coupling { terms: vec![term], omega: 1e15, k: 1e7, tau: 1e-12 } };
    let psi0 = SpinorAmplitudes::basis_state(&basis, 0, Spin::Up, 0.0).unwrap();
    let want = (omega_r * t_end / 2.0).sin().powi(2);
    for frame in [Frame::Interaction, Frame::Dressed] {
        let opts = EvolveOptions { frame, rel_tol: 1e-11, abs_tol: 1e-14, ..Default::default() };
        let got = evolve(&sys, &psi0, 0.0, t_end, &opts).unwrap().psi.get(0, Spin::Down).norm_sqr();
        pass &= (got - want).abs() < 1e-8;
        d.push(format!("Rabi oracle ({frame:?} frame): P = {got:.12}, exact {want:.12}, error {:.1e} (< 1e-8)", (got - want).abs()));
    }

    let conv = pauli::convergence_check(&sc.run_spec(Process::Skd, 1e18).unwrap().0);
    pass &= conv.pass && conv.max_rel_change < 0.01;
    d.push(format!(
        "truncation: doubling the ladder and tightening tolerance tenfold changes populations > 1e-12 by at most {:.2e} (< 0.01){}",
        conv.max_rel_change,
        conv.failure.map(|f| format!(", {f}")).unwrap_or_default()
    ));
    report(7, "ladder solver properties", pass, &d);
}

#[test]
fn criterion_8_classical_suite() {
    let start = Instant::now();
    let mut d = Vec::new();
    let mut pass = true;
    let cs = ClassicalScenario::default();
    let (_, rep) = run_scenario(&cs, 1).unwrap();
    pass &= rep.trajectories.len() == 9 && rep.reflections == 0 && rep.max_gamma_minus_1 < 5e-3 && rep.max_abs_dpz_mc < 1e-4;
    d.push(format!(
        "{} trajectories, {} reflections, max γ−1 = {:.3e} (< 5e-3), max |Δp_z|/mc = {:.3e} (< 1e-4, {:.1} ħk0)",
        rep.trajectories.len(),
        rep.reflections,
        rep.max_gamma_minus_1,
        rep.max_abs_dpz_mc,
        rep.max_abs_dpz_hbar_k0
    ));

    // uniform magnetic field: rate b/γ, radius p⊥/b
    let b = 0.01;
    let f = StaticField { e: [0.0; 3], b: [0.0, 0.0, b] };
    let p0 = [2e-3, 0.0, 1e-3];
    let mut s = ParticleState { r: [0.0; 3], p: p0, t: 0.0 };
    let gamma = s.gamma();
    let (dt, n) = (0.01, 200_000);
    let (mut xmin, mut xmax, mut angle) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for _ in 0..n {
        let next = step(&s, dt, &f).unwrap();
        angle += (next.p[1].atan2(next.p[0]) - s.p[1].atan2(s.p[0]) + PI).rem_euclid(2.0 * PI) - PI;
        s = next;
        xmin = xmin.min(s.r[0]);
        xmax = xmax.max(s.r[0]);
    }
    let rate = angle.abs() / (n as f64 * dt);
    let radius = 0.5 * (xmax - xmin);
    let (e_rate, e_radius) = (rel(rate, b / gamma), rel(radius, p0[0] / b));
    pass &= e_rate < 1e-6 && e_radius < 1e-6;
    d.push(format!("gyromotion: rate error {e_rate:.1e}, radius error {e_radius:.1e} (< 1e-6)"));

    // step halving on the central trajectory: the Boris push is second order, so
    // successive differences shrink fourfold and (4/3)·d1 estimates the error at dt
    let field = cs.field().unwrap();
    let ic = cs.ic_grid()[4];
    let runs: Vec<_> = (0..3)
        .map(|k| {
            let f = 1usize << k;
            // matching strides put every final sample at the same time
            let tr = run_trajectory(ic, &field, cs.t_end, cs.dt() / f as f64, 1000 * f).unwrap();
            (tr.last().p, *tr.gamma_minus_1.last().unwrap())
        })
        .collect();
    for i in 0..3 {
        let (d1, d2) = (runs[0].0[i] - runs[1].0[i], runs[1].0[i] - runs[2].0[i]);
        let order = (d1 / d2).log2();
        pass &= (order - 2.0).abs() < 0.2;
        d.push(format!("step halving, p[{i}]: differences {d1:.2e}, {d2:.2e}, observed order {order:.3} (2 ± 0.2)"));
    }
    let err_pz = 4.0 / 3.0 * (runs[0].0[2] - runs[1].0[2]).abs();
    let err_g = 4.0 / 3.0 * (runs[0].1 - runs[1].1).abs();
    pass &= err_pz < 1e-6 && err_g < 5e-5;
    d.push(format!("estimated step error at production dt: p_z {err_pz:.2e} mc (< 1e-6), γ−1 {err_g:.2e} (< 5e-5), 1% of the bounds"));

    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    d.push(format!("runtime {secs:.1} s (< 60 s)"));
    report(8, "classical trajectories", pass, &d);
}

#[test]
fn criterion_9_order_of_magnitude_estimates() {
    let larmor = larmor_probability(1e19, 800e-9, 10e-12);
    let r = spurious_ratios(1e19, 1e7, 1.064e-6, PI / 2.0);
    let within = |x: f64, target: f64, f: f64| x >= target / f && x <= target * f;
    let checks = [
        (within(larmor, 1e-2, 5.0), format!("photon emission probability {larmor:.3e} (1e-2 within factor 5)")),
        (
            within(r.first_to_second_order, 1e6, 3.0),
            format!("first/second-order ratio {:.3e} (1e6 within factor 3)", r.first_to_second_order),
        ),
        (
            within(r.two_color_to_skd_unsuppressed, 1e5, 3.0),
            format!("two-color/SKD vertex ratio {:.3e} (1e5 within factor 3)", r.two_color_to_skd_unsuppressed),
        ),
    ];
    let pass = checks.iter().all(|c| c.0);
    report(9, "order-of-magnitude estimates", pass, &checks.map(|c| c.1));
}
