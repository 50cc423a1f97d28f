//! Command-line experiment runner for quantum stochastic walks.
//!
//! Every subcommand reads an optional JSON config, applies flag overrides
//! and writes CSV/JSON results into the output directory.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qsw_core::analysis::{detect_moralization, symmetry_deviation};
use qsw_core::experiments::{scaling_run, simulate, Model, ScalingRun, System};
use qsw_core::{Digraph, Method};
use rayon::prelude::*;
use serde::Serialize;

use config::{matrix_to_json, parse_times, ConfigError, ExperimentConfig, InitialSpec, JsonMatrix};

/// Exit code when the moralization detector flags a pair.
pub const EXIT_DETECTOR_FAIL: i32 = 2;

const DEFAULT_TOL: f64 = 1e-10;
const SCALING_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "qsw",
    version,
    about = "Quantum stochastic walks on directed graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a state and write per-vertex probabilities over time.
    Simulate(CommonArgs),
    /// Second-moment growth and windowed log-log slopes on a path.
    Scaling(CommonArgs),
    /// Check whether a model moves amplitude between non-adjacent vertices.
    MoralCheck(CommonArgs),
    /// Mirror-symmetry deviation of the profile on a path.
    Symmetry(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Builtin graph (figure1, figure3, line:N, segment:N) or graph file.
    #[arg(long)]
    pub graph: Option<String>,
    /// global, local, corrected, corrected+rot, symmetrized or weighted.
    #[arg(long)]
    pub model: Option<Model>,
    /// Weight of the dissipative part, in [0, 1]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Comma-separated weights for `scaling`.
    #[arg(long, value_delimiter = ',')]
    pub omegas: Option<Vec<f64>>,
    /// `t1,t2,...` or `start:stop:count[:log|linear]`.
    #[arg(long)]
    pub times: Option<String>,
    /// Initial vertex index.
    #[arg(long, conflicts_with = "initial_file")]
    pub initial: Option<usize>,
    /// Initial density matrix as JSON rows of [re, im] pairs.
    #[arg(long)]
    pub initial_file: Option<PathBuf>,
    /// Origin vertex for line coordinates and mirror symmetry (default n/2)
    #[arg(long)]
    pub center: Option<usize>,
    /// Points per regression window.
    #[arg(long)]
    pub window: Option<usize>,
    /// Integrator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write density-matrix snapshots.
    #[arg(long)]
    pub snapshots: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let initial = match (&self.initial, &self.initial_file) {
            (Some(v), _) => Some(InitialSpec::Vertex(*v)),
            (None, Some(f)) => Some(InitialSpec::File { file: f.clone() }),
            (None, None) => None,
        };
        let times = self.times.as_deref().map(parse_times).transpose()?;
        Ok(base.merge(ExperimentConfig {
            model: self.model,
            graph: self.graph.clone(),
            omega: self.omega,
            omegas: self.omegas.clone(),
            times,
            initial,
            center: self.center,
            window: self.window,
            tolerance: self.tol,
            snapshots: self.snapshots.then_some(true),
        }))
    }
}

type Runner = fn(&ExperimentConfig, &Path) -> Result<i32>;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let (args, f): (&CommonArgs, Runner) = match &cli.command {
        Command::Simulate(a) => (a, run_simulate),
        Command::Scaling(a) => (a, run_scaling),
        Command::MoralCheck(a) => (a, run_moral_check),
        Command::Symmetry(a) => (a, run_symmetry),
    };
    let cfg = args.resolve()?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    f(&cfg, &args.out)
}

/// Full-precision float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, &text)
}

fn header(first: &[&str], n: usize) -> String {
    let mut cols: Vec<String> = first.iter().map(|s| s.to_string()).collect();
    cols.extend((0..n).map(|v| format!("v{v}")));
    cols.join(",") + "\n"
}

fn model(cfg: &ExperimentConfig) -> Result<Model, ConfigError> {
    cfg.model
        .ok_or_else(|| ConfigError::new("model", "missing"))
}

fn require_path(g: &Digraph) -> Result<(), ConfigError> {
    if *g != Digraph::path(g.n()) {
        return Err(ConfigError::new(
            "graph",
            "this experiment needs a path graph (line:N or segment:N)",
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct Snapshot {
    t: f64,
    rho: JsonMatrix,
}

/// Writes `profiles.csv` and, if requested, `snapshots.json`.
pub fn run_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let sys = System::build(cfg.graph()?, model(cfg)?, cfg.omega()?)?;
    let times = cfg.times()?;
    let init = cfg.initial(0)?;
    let method = Method::Auto(cfg.ode_options(DEFAULT_TOL)?);
    let traj = simulate(&sys, &init, &times, &method)?;

    let mut csv = header(&["t"], sys.graph().n());
    for (t, p) in traj.times.iter().zip(&traj.profiles) {
        let row: Vec<String> = std::iter::once(*t)
            .chain(p.as_slice().iter().copied())
            .map(fmt_f64)
            .collect();
        writeln!(csv, "{}", row.join(","))?;
    }
    write_file(&out.join("profiles.csv"), &csv)?;
    if cfg.snapshots.unwrap_or(false) {
        let snaps: Vec<Snapshot> = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, s)| Snapshot {
                t,
                rho: matrix_to_json(s.matrix()),
            })
            .collect();
        write_json(&out.join("snapshots.json"), &snaps)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct ScalingSummary {
    label: String,
    omega: Option<f64>,
    file: String,
    final_slope: f64,
    slopes: Vec<f64>,
}

fn scaling_csv(run: &ScalingRun) -> Result<String> {
    let s = &run.series;
    let mut csv = String::from("t,mu2,slope\n");
    for (i, (t, m)) in s.times().iter().zip(s.mu2()).enumerate() {
        let slope = (i + 1)
            .checked_sub(s.window())
            .map(|k| fmt_f64(s.slopes()[k]))
            .unwrap_or_default();
        writeln!(csv, "{},{},{}", fmt_f64(*t), fmt_f64(*m), slope)?;
    }
    Ok(csv)
}

/// One CSV of `t, mu2, slope` per run plus `scaling_summary.json`. The
/// slope on a row is that of the window ending there.
///
/// `weighted` sweeps `omegas`; other models give a single run.
pub fn run_scaling(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let g = cfg.graph()?;
    require_path(&g)?;
    let n = g.n();
    let center = cfg.center.unwrap_or(n / 2);
    if center >= n {
        return Err(
            ConfigError::new("center", format!("{center} outside path of {n} vertices")).into(),
        );
    }
    let model = cfg.model_or(Model::Weighted);
    let times = cfg.times()?;
    let window = cfg.window()?;
    let opts = cfg.ode_options(SCALING_TOL)?;

    let jobs: Vec<(String, Option<f64>)> = if model == Model::Weighted {
        cfg.omegas()?
            .into_iter()
            .map(|w| (format!("omega_{w}"), Some(w)))
            .collect()
    } else {
        vec![(model.name().replace('+', "_"), cfg.omega()?)]
    };
    let runs: Vec<ScalingRun> = jobs
        .par_iter()
        .map(|(label, w)| {
            let sys = System::build(g.clone(), model, *w)?;
            Ok(scaling_run(
                label.clone(),
                &sys,
                center,
                &times,
                window,
                &opts,
            )?)
        })
        .collect::<Result<_>>()?;

    let mut summary = Vec::new();
    for run in &runs {
        let file = format!("scaling_{}.csv", run.label);
        write_file(&out.join(&file), &scaling_csv(run)?)?;
        summary.push(ScalingSummary {
            label: run.label.clone(),
            omega: run.omega,
            file,
            final_slope: run.series.final_slope(),
            slopes: run.series.slopes().to_vec(),
        });
    }
    write_json(&out.join("scaling_summary.json"), &summary)?;
    Ok(0)
}

#[derive(Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct MoralReport {
    pub model: String,
    pub n: usize,
    pub base_edges: Vec<[usize; 2]>,
    pub moral_extra_edges: Vec<[usize; 2]>,
    pub detected_pairs: Vec<[usize; 2]>,
    pub topology_preserved: bool,
}

/// Writes `moral_check.json`; exit code 2 if any pair is detected.
pub fn run_moral_check(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let g = cfg.graph()?;
    let model = cfg.model_or(Model::Global);
    let sys = System::build(g.clone(), model, cfg.omega()?)?;
    let detected = detect_moralization(sys.generator(), &g, sys.embedding())?;
    let report = MoralReport {
        model: model.name().into(),
        n: g.n(),
        base_edges: g.arcs().map(|(a, b)| [a, b]).collect(),
        moral_extra_edges: g
            .moral_extra_edges()
            .into_iter()
            .map(|(a, b)| [a, b])
            .collect(),
        detected_pairs: detected.iter().map(|&(a, b)| [a, b]).collect(),
        topology_preserved: detected.is_empty(),
    };
    write_json(&out.join("moral_check.json"), &report)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(if report.topology_preserved {
        0
    } else {
        EXIT_DETECTOR_FAIL
    })
}

/// Writes `symmetry.csv` with `t, deviation, v0, …` for each time.
pub fn run_symmetry(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let g = cfg.graph()?;
    require_path(&g)?;
    let n = g.n();
    let center = cfg.center.unwrap_or(n / 2);
    if center >= n {
        return Err(
            ConfigError::new("center", format!("{center} outside path of {n} vertices")).into(),
        );
    }
    let sys = System::build(g, cfg.model_or(Model::Symmetrized), cfg.omega()?)?;
    let times = cfg.times()?;
    let method = Method::Auto(cfg.ode_options(DEFAULT_TOL)?);
    let traj = simulate(&sys, &cfg.initial(center)?, &times, &method)?;
    let mut csv = header(&["t", "deviation"], n);
    for (t, p) in traj.times.iter().zip(&traj.profiles) {
        let dev = symmetry_deviation(p, center)?;
        let row: Vec<String> = [*t, dev]
            .into_iter()
            .chain(p.as_slice().iter().copied())
            .map(fmt_f64)
            .collect();
        writeln!(csv, "{}", row.join(","))?;
    }
    write_file(&out.join("symmetry.csv"), &csv)?;
    Ok(0)
}

/// Entry point shared by the binary: parse, run, map errors to exit code 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
