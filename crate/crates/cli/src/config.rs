//! Experiment configuration: JSON file plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use qsw_core::experiments::{builtin_graph, InitialState, Model, Spacing, TimeGrid};
use qsw_core::{Complex64, ComplexMatrix, DensityMatrix, Digraph, OdeOptions};
use serde::Deserialize;
use thiserror::Error;

/// A configuration problem tied to the offending field.
#[derive(Debug, Error)]
#[error("config field '{field}': {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl std::fmt::Display) -> Self {
        Self {
            field,
            message: message.to_string(),
        }
    }
}

/// Starting state as written in a config file: a vertex index,
/// `{"vertex": v, "copy": k}`, or `{"file": path}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Vertex(usize),
    Copy { vertex: usize, copy: usize },
    File { file: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<Model>,
    /// Builtin name (`figure1`, `figure3`, `line:n`, `segment:n`) or a path
    /// to an edge list / JSON graph.
    pub graph: Option<String>,
    pub omega: Option<f64>,
    /// Weights swept by `scaling`.
    pub omegas: Option<Vec<f64>>,
    pub times: Option<TimeGrid>,
    pub initial: Option<InitialSpec>,
    /// Origin of the line coordinates and mirror point for `symmetry`.
    pub center: Option<usize>,
    pub window: Option<usize>,
    /// Absolute and relative tolerance of the adaptive integrator.
    pub tolerance: Option<f64>,
    /// Also write full density matrices.
    pub snapshots: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::new("config", e))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(model, graph, omega, omegas, times, initial, center, window, tolerance, snapshots);
        self
    }

    pub fn model_or(&self, default: Model) -> Model {
        self.model.unwrap_or(default)
    }

    pub fn graph(&self) -> Result<Digraph, ConfigError> {
        let spec = self
            .graph
            .as_deref()
            .ok_or_else(|| ConfigError::new("graph", "missing"))?;
        load_graph(spec).map_err(|e| ConfigError::new("graph", e))
    }

    pub fn omega(&self) -> Result<Option<f64>, ConfigError> {
        match self.omega {
            Some(w) if !(0.0..=1.0).contains(&w) => {
                Err(ConfigError::new("omega", format!("{w} outside [0, 1]")))
            }
            w => Ok(w),
        }
    }

    pub fn omegas(&self) -> Result<Vec<f64>, ConfigError> {
        let ws = match (&self.omegas, self.omega) {
            (Some(ws), _) => ws.clone(),
            (None, Some(w)) => vec![w],
            (None, None) => return Err(ConfigError::new("omegas", "missing")),
        };
        if ws.is_empty() {
            return Err(ConfigError::new("omegas", "empty list"));
        }
        if let Some(w) = ws.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(ConfigError::new("omegas", format!("{w} outside [0, 1]")));
        }
        Ok(ws)
    }

    pub fn times(&self) -> Result<Vec<f64>, ConfigError> {
        let grid = self
            .times
            .as_ref()
            .ok_or_else(|| ConfigError::new("times", "missing"))?;
        grid.times().map_err(|e| ConfigError::new("times", e))
    }

    pub fn initial(&self, default_vertex: usize) -> Result<InitialState, ConfigError> {
        Ok(match &self.initial {
            None => InitialState::Vertex(default_vertex),
            Some(InitialSpec::Vertex(v)) => InitialState::Vertex(*v),
            Some(InitialSpec::Copy { vertex, copy }) => InitialState::Copy {
                vertex: *vertex,
                copy: *copy,
            },
            Some(InitialSpec::File { file }) => {
                InitialState::State(read_state(file).map_err(|e| ConfigError::new("initial", e))?)
            }
        })
    }

    pub fn window(&self) -> Result<usize, ConfigError> {
        match self.window.unwrap_or(qsw_core::analysis::DEFAULT_WINDOW) {
            w if w < 2 => Err(ConfigError::new("window", "must be at least 2")),
            w => Ok(w),
        }
    }

    pub fn ode_options(&self, default_tol: f64) -> Result<OdeOptions, ConfigError> {
        let tol = self.tolerance.unwrap_or(default_tol);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(ConfigError::new(
                "tolerance",
                format!("{tol} must be positive"),
            ));
        }
        Ok(OdeOptions::with_tol(tol))
    }
}

/// Builtin graph name or file path (`.json` files are parsed as JSON,
/// anything else as an edge list).
pub fn load_graph(spec: &str) -> anyhow::Result<Digraph> {
    if let Ok(g) = builtin_graph(spec) {
        return Ok(g);
    }
    let path = Path::new(spec);
    if !path.exists() {
        anyhow::bail!("'{spec}' is neither a builtin graph nor an existing file");
    }
    let text = fs::read_to_string(path)?;
    let g = if path.extension().is_some_and(|e| e == "json") {
        Digraph::from_json(&text)?
    } else {
        Digraph::parse_edge_list(&text)?
    };
    Ok(g)
}

/// Square matrix as rows of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn read_state(path: &Path) -> anyhow::Result<DensityMatrix> {
    let rows: JsonMatrix = serde_json::from_str(&fs::read_to_string(path)?)?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        anyhow::bail!("state in {} is not square", path.display());
    }
    let entries = rows
        .into_iter()
        .flatten()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    Ok(DensityMatrix::new(ComplexMatrix::new(n, n, entries)?)?)
}

/// Parses `1,2.5,4` into explicit times, or `start:stop:count[:log]` into a grid.
pub fn parse_times(s: &str) -> Result<TimeGrid, ConfigError> {
    let bad = |e: &dyn std::fmt::Display| ConfigError::new("times", format!("'{s}': {e}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad(&"expected start:stop:count[:log|linear]"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|e| bad(&e))?;
        let stop: f64 = parts[1].trim().parse().map_err(|e| bad(&e))?;
        let count: usize = parts[2].trim().parse().map_err(|e| bad(&e))?;
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(bad(&format!("unknown spacing '{other}'"))),
        };
        Ok(TimeGrid::Grid {
            start,
            stop,
            count,
            spacing,
        })
    } else {
        parse_list(s).map(TimeGrid::Explicit).map_err(|e| bad(&e))
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    s.split(',').map(|x| x.trim().parse()).collect()
}
