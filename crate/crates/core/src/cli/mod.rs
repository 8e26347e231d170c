//! Command-line front end: loads a scenario, applies flag overrides, runs one
//! command and writes its files with a manifest.
//!
//! Exit status: 0 success, 2 configuration or usage error (nothing written),
//! 3 solver error (files written, failures flagged in the manifest), 1 I/O
//! failure while writing.

pub mod commands;
pub mod output;

use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{Overrides, Scenario};
use crate::error::{Error, Result};
use output::{Artifacts, RunStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

const DEFAULT_OUT_DIR: &str = "kdsim-out";

#[derive(Debug, Parser)]
#[command(name = "kdsim", version, about = "Spin-dependent Kapitza-Dirac scattering: tables, figures and single runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Output directory [default: scenario output.dir, else ./kdsim-out]
    #[arg(long, env = "KDSIM_OUT_DIR", global = true)]
    pub out_dir: Option<PathBuf>,
    /// Relative tolerance of the ODE and quadratures
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Ladder truncation |n| ≤ N
    #[arg(long, global = true)]
    pub ladder_max: Option<i32>,
    /// Classical steps per 2ω period
    #[arg(long, global = true)]
    pub dt_divisor: Option<f64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scaling laws against quadrature for the benchmark rows
    Table1 { config: Option<PathBuf> },
    /// Intensity scans, perturbation theory and ladder solver, with slope fits
    Figure3 { config: Option<PathBuf> },
    /// Final momentum distribution of the SKD run
    Figure4 { config: Option<PathBuf> },
    /// Nine classical trajectories through the focused pulses
    Figure5 { config: Option<PathBuf> },
    /// Ladder evolution of the scenario's pulses and electron
    Run { scenario: PathBuf },
    /// Vector potential and magnetic field snapshot over two wavelengths
    Fields {
        config: Option<PathBuf>,
        /// Snapshot times in seconds
        #[arg(long, value_delimiter = ',', default_value = "0")]
        times: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Table1 { .. } => "table1",
            Command::Figure3 { .. } => "figure3",
            Command::Figure4 { .. } => "figure4",
            Command::Figure5 { .. } => "figure5",
            Command::Run { .. } => "run",
            Command::Fields { .. } => "fields",
        }
    }

    fn config(&self) -> Option<&Path> {
        match self {
            Command::Table1 { config }
            | Command::Figure3 { config }
            | Command::Figure4 { config }
            | Command::Figure5 { config }
            | Command::Fields { config, .. } => config.as_deref(),
            Command::Run { scenario } => Some(scenario),
        }
    }
}

/// Scenario from `path` (defaults when absent) with the flag overrides applied.
pub fn resolve_scenario(path: Option<&Path>, flags: &Flags) -> Result<Scenario> {
    let sc = match path {
        Some(p) => Scenario::load(p)?,
        None => Scenario::default(),
    };
    let o = Overrides { tolerance: flags.tolerance, ladder_max: flags.ladder_max, dt_divisor: flags.dt_divisor, threads: flags.threads };
    sc.with_overrides(&o)
}

pub fn execute(command: &Command, sc: &Scenario, hash: &str) -> Result<Artifacts> {
    match command {
        Command::Table1 { .. } => commands::table1(sc, hash),
        Command::Figure3 { .. } => commands::figure3(sc, hash),
        Command::Figure4 { .. } => commands::figure4(sc, hash),
        Command::Figure5 { .. } => commands::figure5(sc, hash),
        Command::Run { .. } => commands::run(sc, hash),
        Command::Fields { times, points, .. } => commands::field_snapshot(sc, times, *points),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let name = cli.command.name();
    let sc = match resolve_scenario(cli.command.config(), &cli.flags) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("kdsim {name}: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Command::Fields { times, points, .. } = &cli.command {
        if *points < 2 || times.iter().any(|t| !t.is_finite()) {
            eprintln!("kdsim fields: need at least 2 points and finite times");
            return EXIT_CONFIG;
        }
    }
    let dir = cli.flags.out_dir.clone().or_else(|| sc.output.dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let hash = sc.hash();
    let art = match execute(&cli.command, &sc, &hash) {
        Ok(a) => a,
        Err(e @ Error::Config(_)) => {
            eprintln!("kdsim {name}: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("kdsim {name}: {e}");
            let mut a = Artifacts::default();
            a.runs.push(RunStatus { name: name.into(), ok: false, error: Some(e.to_string()) });
            a
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    match output::write_all(&dir, name, &sc.canonical_json(), &hash, elapsed, &art) {
        Ok(m) => eprintln!("kdsim {name}: wrote {} files and {} in {elapsed:.1} s", art.files.len(), m.display()),
        Err(e) => {
            eprintln!("kdsim {name}: writing {}: {e}", dir.display());
            return EXIT_IO;
        }
    }
    let failed = art.failed();
    if failed > 0 {
        for r in art.runs.iter().filter(|r| !r.ok) {
            eprintln!("  failed {}: {}", r.name, r.error.as_deref().unwrap_or(""));
        }
        EXIT_SOLVER
    } else {
        EXIT_OK
    }
}
